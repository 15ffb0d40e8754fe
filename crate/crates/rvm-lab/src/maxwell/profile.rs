//! Half-wave profiles of the electromagnetic field.
//!
//! The complex half-waves u₁ = |∇|⁻¹(∂_t − i|∇|)E and u₂ = |∇|⁻¹(∂_t − i|∇|)B
//! turn Maxwell into (∂_t + i|∇|)u = |∇|⁻¹(source); their profiles
//! h_i = e^{it|∇|} u_i are constant under free flow. The field comes back via
//! E = (−u₁ + ū₁)/2i, and the zeroth-order modified profile subtracts the
//! resonant contribution of the particle density, removing the linear part of
//! ∂_t ĥ entirely.

use crate::fft::{idx, mirror_bin};
use crate::geometry::frame::hat_v;
use crate::maxwell::state::{FieldState, Grid, SourceSpectra};
use crate::{dot, norm, scale, Vec3};
use num_complex::Complex64;

use crate::geometry::cutoff::SmoothCutoff;

const PSI: SmoothCutoff = SmoothCutoff;

#[derive(Clone, Debug)]
pub struct HalfWaveProfile {
    pub grid: Grid,
    pub time: f64,
    pub h1: [Vec<Complex64>; 3],
    pub h2: [Vec<Complex64>; 3],
}

/// ĥ_i(ξ) = e^{it|ξ|} |ξ|⁻¹ (∂_t − i|ξ|) F̂_i with F₁ = E, F₂ = B; the zero
/// mode is set to zero by convention. The time derivatives come from the
/// field equations with the given sources.
pub fn extract_profiles(state: &FieldState, src: &SourceSpectra) -> HalfWaveProfile {
    let grid = state.grid;
    let t = state.time;
    let e_dot = state.e_dot_hat(src);
    let b_dot = state.b_dot_hat();
    let mut h1 = [
        vec![Complex64::default(); grid.cells()],
        vec![Complex64::default(); grid.cells()],
        vec![Complex64::default(); grid.cells()],
    ];
    let mut h2 = h1.clone();
    let i = Complex64::new(0.0, 1.0);
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let k = norm(grid.xi(ix, iy, iz));
        let phase = Complex64::from_polar(1.0, t * k);
        for d in 0..3 {
            h1[d][flat] = phase * (e_dot[d][flat] - i * k * state.e_hat[d][flat]) / k;
            h2[d][flat] = phase * (b_dot[d][flat] - i * k * state.b_hat[d][flat]) / k;
        }
    }
    HalfWaveProfile {
        grid,
        time: t,
        h1,
        h2,
    }
}

/// Rebuild (Ê, B̂) at the profile's timestamp: Ê(ξ) = (−û₁(ξ) + conj û₁(−ξ))/2i
/// with û = e^{−it|ξ|} ĥ. Zero modes come back as zero.
pub fn reconstruct_fields(profile: &HalfWaveProfile) -> FieldState {
    let grid = profile.grid;
    let t = profile.time;
    let mut state = FieldState::zero(grid);
    state.time = t;
    let n = grid.n;
    let two_i = Complex64::new(0.0, 2.0);
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let k = norm(grid.xi(ix, iy, iz));
        let mflat = idx(n, mirror_bin(n, ix), mirror_bin(n, iy), mirror_bin(n, iz));
        let km = k; // |−ξ| = |ξ|
        let phase = Complex64::from_polar(1.0, -t * k);
        let phase_m = Complex64::from_polar(1.0, -t * km);
        for d in 0..3 {
            let u1 = phase * profile.h1[d][flat];
            let u1_m = (phase_m * profile.h1[d][mflat]).conj();
            state.e_hat[d][flat] = (-u1 + u1_m) / two_i;
            let u2 = phase * profile.h2[d][flat];
            let u2_m = (phase_m * profile.h2[d][mflat]).conj();
            state.b_hat[d][flat] = (-u2 + u2_m) / two_i;
        }
    }
    state
}

/// The dyadic-shell norm sup_k 2^{(n+1)k} ‖∇_ξ^n ĥ ψ_k(ξ)‖_∞ on the lattice.
///
/// ∇_ξ is the centered lattice difference; entries whose stencil would cross
/// the Nyquist wrap are dropped. Shells holding fewer than 8 lattice points
/// are skipped.
pub fn xn_norm(h: &[Vec<Complex64>; 3], grid: Grid, order: usize) -> f64 {
    assert!(order <= 3, "frequency-derivative order capped at 3");
    // tensor of current derivatives, one flattened array per component chain
    let mut tensors: Vec<Vec<Complex64>> = h.to_vec();
    for _ in 0..order {
        let mut next = Vec::with_capacity(tensors.len() * 3);
        for t in &tensors {
            let grads = lattice_gradient(t, grid);
            next.extend(grads);
        }
        tensors = next;
    }
    // |T(ξ)| pointwise, then the shell sup
    let k_min = (grid.xi(1, 0, 0)[0]).log2().floor() as i32 - 2;
    let k_max = (norm(grid.xi(grid.n / 2, grid.n / 2, grid.n / 2)))
        .log2()
        .ceil() as i32
        + 1;
    let mut best = 0.0f64;
    for shell in k_min..=k_max {
        let mut count = 0usize;
        let mut peak = 0.0f64;
        for (flat, (ix, iy, iz)) in grid.bins() {
            if (ix, iy, iz) == (0, 0, 0) {
                continue;
            }
            let k = norm(grid.xi(ix, iy, iz));
            let w = PSI.shell(shell, k);
            if w == 0.0 {
                continue;
            }
            count += 1;
            let mut mag2 = 0.0;
            let mut finite = true;
            for t in &tensors {
                let z = t[flat];
                if !z.re.is_finite() {
                    finite = false;
                    break;
                }
                mag2 += z.norm_sqr();
            }
            if finite {
                peak = peak.max(w * mag2.sqrt());
            }
        }
        if count < 8 {
            continue;
        }
        best = best.max(((order as f64 + 1.0) * shell as f64).exp2() * peak);
    }
    best
}

/// Centered lattice differences in ξ; stencil entries that would cross the
/// Nyquist wrap become NaN and are ignored by consumers.
fn lattice_gradient(field: &[Complex64], grid: Grid) -> [Vec<Complex64>; 3] {
    let n = grid.n;
    let dxi = 2.0 * std::f64::consts::PI / grid.length;
    let nan = Complex64::new(f64::NAN, f64::NAN);
    let mut out = [
        vec![nan; grid.cells()],
        vec![nan; grid.cells()],
        vec![nan; grid.cells()],
    ];
    let neighbor = |bin: usize, step: i64| -> Option<usize> {
        let m = crate::fft::harmonic(n, bin) + step;
        if m < -(n as i64) / 2 || m > n as i64 / 2 - 1 {
            None
        } else {
            Some((m.rem_euclid(n as i64)) as usize)
        }
    };
    for (flat, (ix, iy, iz)) in grid.bins() {
        let bins = [ix, iy, iz];
        for d in 0..3 {
            let (p, m) = (neighbor(bins[d], 1), neighbor(bins[d], -1));
            if let (Some(p), Some(m)) = (p, m) {
                let mut bp = bins;
                let mut bm = bins;
                bp[d] = p;
                bm[d] = m;
                let fp = field[idx(n, bp[0], bp[1], bp[2])];
                let fm = field[idx(n, bm[0], bm[1], bm[2])];
                out[d][flat] = (fp - fm) / (2.0 * dxi);
            }
        }
    }
    out
}

/// The low-frequency bins |harmonic| ≤ thin (per axis), zero mode excluded.
pub fn low_mode_bins(grid: Grid, thin: usize) -> Vec<usize> {
    let mut bins = Vec::new();
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let ok = |b: usize| crate::fft::harmonic(grid.n, b).unsigned_abs() as usize <= thin;
        if ok(ix) && ok(iy) && ok(iz) {
            bins.push(flat);
        }
    }
    bins
}

/// Zeroth-order modified-profile corrections on a thinned low-frequency
/// lattice: for each ξ in `bins`,
///
///   corr₁(ξ) = Σ_p w_p e^{i(t|ξ| − ξ·x_p)} · 4π (v̂(v̂·ξ) − ξ) / (|ξ|(|ξ|−v̂·ξ)),
///   corr₂(ξ) = Σ_p w_p e^{i(t|ξ| − ξ·x_p)} · 4π (v̂ × ξ) / (|ξ|(|ξ|−v̂·ξ)),
///
/// so that ĥ̃_i = ĥ_i − corr_i has no linear (density) source left in its
/// time derivative. The phase |ξ| − v̂·ξ is strictly positive for every
/// particle and mode. With `cic_dx` set, the kernels carry the cloud-in-cell
/// shape factor, matching the deposited (filtered) sources exactly.
pub fn modified_profile_correction(
    grid: Grid,
    time: f64,
    positions: &[Vec3],
    momenta: &[Vec3],
    weights: &[f64],
    bins: &[usize],
    cic_dx: Option<f64>,
) -> Vec<([Complex64; 3], [Complex64; 3])> {
    let n = grid.n;
    let mut corr = vec![([Complex64::default(); 3], [Complex64::default(); 3]); bins.len()];
    // decompose each flat bin back into (ix,iy,iz) once
    let coords: Vec<(usize, usize, usize)> = bins
        .iter()
        .map(|&flat| {
            let ix = flat % n;
            let iy = (flat / n) % n;
            let iz = flat / (n * n);
            (ix, iy, iz)
        })
        .collect();
    let shape: Vec<f64> = coords
        .iter()
        .map(|&(ix, iy, iz)| match cic_dx {
            None => 1.0,
            Some(dx) => {
                let s = |b: usize| {
                    let a = crate::fft::freq(n, grid.length, b) * dx / 2.0;
                    if a.abs() < 1e-12 {
                        1.0
                    } else {
                        (a.sin() / a).powi(2)
                    }
                };
                s(ix) * s(iy) * s(iz)
            }
        })
        .collect();
    let four_pi = 4.0 * std::f64::consts::PI;
    for ((&w, &x), &v) in weights.iter().zip(positions).zip(momenta) {
        let vh = hat_v(v);
        // per-axis phase tables e^{−i ξ_d x_d} for all bins on that axis
        let mut tables: [Vec<Complex64>; 3] = [vec![], vec![], vec![]];
        for d in 0..3 {
            tables[d] = (0..n)
                .map(|b| Complex64::from_polar(1.0, -crate::fft::freq(n, grid.length, b) * x[d]))
                .collect();
        }
        for (slot, &(ix, iy, iz)) in coords.iter().enumerate() {
            let xi = grid.xi(ix, iy, iz);
            let k = norm(xi);
            let phase_geo = tables[0][ix] * tables[1][iy] * tables[2][iz];
            let phase = Complex64::from_polar(1.0, time * k) * phase_geo;
            let res = k - dot(vh, xi);
            let amp = w * four_pi * shape[slot] / (k * res);
            let electric = crate::sub(scale(vh, dot(vh, xi)), xi);
            let magnetic = crate::cross(vh, xi);
            for d in 0..3 {
                corr[slot].0[d] += phase * (amp * electric[d]);
                corr[slot].1[d] += phase * (amp * magnetic[d]);
            }
        }
    }
    corr
}
