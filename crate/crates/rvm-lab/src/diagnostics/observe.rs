//! Per-snapshot observables: light-cone field sampling, density moments,
//! truncated energy surrogates, and conservation monitors.

use crate::fft::Fft3;
use crate::geometry::frame::gamma;
use crate::maxwell::profile::{xn_norm, HalfWaveProfile};
use crate::maxwell::state::{FieldState, Grid};
use crate::particles::ensemble::ParticleEnsemble;
use crate::{add, norm, scale, Vec3};

/// Sample points x = center + (t − δ)·direction, following the outgoing
/// light cone at a family of depths δ behind the front.
#[derive(Clone, Debug)]
pub struct ConeSampler {
    pub center: Vec3,
    pub directions: Vec<Vec3>,
    pub offsets: Vec<Offset>,
}

#[derive(Clone, Copy, Debug)]
pub enum Offset {
    /// Fixed depth behind the front.
    Fixed(f64),
    /// Depth growing with time, δ = fraction·t (e.g. |x| = t/2).
    FractionOfT(f64),
}

impl Offset {
    pub fn depth(&self, t: f64) -> f64 {
        match self {
            Offset::Fixed(d) => *d,
            Offset::FractionOfT(f) => f * t,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Offset::Fixed(d) => format!("delta_{d}"),
            Offset::FractionOfT(f) => format!("delta_{f}t"),
        }
    }
}

/// Which field magnitude a cone sample records.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleKind {
    /// |E| + |B|.
    Full,
    /// |B| only: isolates radiation when a quasi-static Coulomb field of a
    /// charged cloud would otherwise dominate the ray samples.
    MagneticOnly,
}

impl ConeSampler {
    pub fn axes(center: Vec3, offsets: Vec<Offset>) -> Self {
        ConeSampler {
            center,
            directions: vec![
                [1.0, 0.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, -1.0, 0.0],
                [0.0, 0.0, 1.0],
                [0.0, 0.0, -1.0],
            ],
            offsets,
        }
    }

    /// Max of the chosen magnitude over the ray directions at each offset,
    /// trilinearly interpolated. Returns None for an offset whose sample
    /// points leave the valid (unwrapped) region t + |x − center| ≥ L/2.
    pub fn sample_kind(
        &self,
        state: &mut FieldState,
        fft: &mut Fft3,
        kind: SampleKind,
    ) -> Vec<(String, Option<f64>)> {
        let t = state.time;
        let half = state.grid.length / 2.0;
        self.offsets
            .iter()
            .map(|off| {
                let r = t - off.depth(t);
                if r < 0.0 || t + r >= half {
                    return (off.label(), None);
                }
                let mut best = 0.0f64;
                for dir in &self.directions {
                    let pos = add(self.center, scale(*dir, r));
                    let (e, b) = state.sample(pos, fft);
                    let val = match kind {
                        SampleKind::Full => norm(e) + norm(b),
                        SampleKind::MagneticOnly => norm(b),
                    };
                    best = best.max(val);
                }
                (off.label(), Some(best))
            })
            .collect()
    }

    pub fn sample(
        &self,
        state: &mut FieldState,
        fft: &mut Fft3,
    ) -> Vec<(String, Option<f64>)> {
        self.sample_kind(state, fft, SampleKind::Full)
    }
}

/// Max over the grid of |∇^α ρ| with the α-th derivative by centered
/// differences (α ≤ 1); for α = 0 this is the densest point.
pub fn density_moment(rho: &[f64], grid: Grid, order: usize) -> f64 {
    let n = grid.n;
    match order {
        0 => rho.iter().cloned().fold(0.0f64, f64::max),
        1 => {
            let dx = grid.dx();
            let mut best = 0.0f64;
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        let mut g = [0.0; 3];
                        let at = |jx: usize, jy: usize, jz: usize| {
                            rho[crate::fft::idx(n, jx % n, jy % n, jz % n)]
                        };
                        g[0] = (at(ix + 1, iy, iz) - at(ix + n - 1, iy, iz)) / (2.0 * dx);
                        g[1] = (at(ix, iy + 1, iz) - at(ix, iy + n - 1, iz)) / (2.0 * dx);
                        g[2] = (at(ix, iy, iz + 1) - at(ix, iy, iz + n - 1)) / (2.0 * dx);
                        best = best.max(norm(g));
                    }
                }
            }
            best
        }
        _ => panic!("density moment derivative order capped at 1"),
    }
}

/// Desk-scale truncations of the profile energies.
#[derive(Clone, Copy, Debug, Default)]
pub struct EnergySurrogates {
    /// Σ_{n≤1} Σ_i ‖h_i‖_{X_n} + (1+t) ‖∂_t h_i‖_{X_n} (∂_t by snapshot
    /// differencing when neighbors are available).
    pub low_eb: f64,
    /// Σ_i sup_k 2^k ‖ĥ_i ψ_k‖_∞ + ‖ĥ_i‖₂ on the lattice.
    pub high_eb: f64,
    /// Weighted L²_v of the velocity marginal of the profile (the x-average
    /// of g), with the desk-scale (1+|v|)-power hierarchy, orders ≤ 1.
    pub weighted_l2_f: f64,
}

pub fn energy_surrogates(
    profile: &HalfWaveProfile,
    neighbors: Option<(&HalfWaveProfile, &HalfWaveProfile)>,
    ensemble: Option<&ParticleEnsemble>,
    sigma_v: f64,
) -> EnergySurrogates {
    let grid = profile.grid;
    let mut low = 0.0;
    for n in 0..=1 {
        low += xn_norm(&profile.h1, grid, n) + xn_norm(&profile.h2, grid, n);
    }
    if let Some((before, after)) = neighbors {
        let dt = after.time - before.time;
        if dt > 0.0 {
            let ddt = |a: &[Vec<num_complex::Complex64>; 3],
                           b: &[Vec<num_complex::Complex64>; 3]| {
                let diff = [
                    a[0].iter().zip(&b[0]).map(|(x, y)| (x - y) / dt).collect(),
                    a[1].iter().zip(&b[1]).map(|(x, y)| (x - y) / dt).collect(),
                    a[2].iter().zip(&b[2]).map(|(x, y)| (x - y) / dt).collect(),
                ];
                let mut s = 0.0;
                for n in 0..=1 {
                    s += xn_norm(&diff, grid, n);
                }
                s
            };
            let dh = ddt(&after.h1, &before.h1) + ddt(&after.h2, &before.h2);
            low += (1.0 + profile.time) * dh;
        }
    }
    let mut high = 0.0;
    for h in [&profile.h1, &profile.h2] {
        high += xn_norm(h, grid, 0);
        let l2: f64 = h
            .iter()
            .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt();
        // lattice L²_ξ with the continuum measure
        high += l2 * (2.0 * std::f64::consts::PI / grid.length).powf(1.5);
    }
    let weighted = ensemble.map_or(0.0, |e| weighted_velocity_l2(e, sigma_v));
    EnergySurrogates {
        low_eb: low,
        high_eb: high,
        weighted_l2_f: weighted,
    }
}

/// CIC-binned velocity marginal with the (1+|v|)-power hierarchy weights,
/// derivative orders 0 and 1 (centered differences on the v-lattice).
fn weighted_velocity_l2(e: &ParticleEnsemble, sigma_v: f64) -> f64 {
    const NB: usize = 24;
    let vmax = 5.0 * sigma_v;
    let dv = 2.0 * vmax / NB as f64;
    let mut marginal = vec![0.0f64; NB * NB * NB];
    for (&v, &w) in e.v.iter().zip(&e.w) {
        // CIC in velocity space, clamped to the box
        let mut base = [0usize; 3];
        let mut frac = [0.0f64; 3];
        let mut inside = true;
        for d in 0..3 {
            let s = (v[d] + vmax) / dv - 0.5;
            if s < 0.0 || s >= (NB - 1) as f64 {
                inside = false;
                break;
            }
            base[d] = s.floor() as usize;
            frac[d] = s - s.floor();
        }
        if !inside {
            continue;
        }
        for corner in 0..8usize {
            let o = [corner & 1, (corner >> 1) & 1, (corner >> 2) & 1];
            let mut wt = w / dv.powi(3);
            for d in 0..3 {
                wt *= if o[d] == 1 { frac[d] } else { 1.0 - frac[d] };
            }
            marginal[(base[2] + o[2]) * NB * NB + (base[1] + o[1]) * NB + base[0] + o[0]] += wt;
        }
    }
    let vcell = |i: usize| -> f64 { -vmax + (i as f64 + 0.5) * dv };
    let mut sum = 0.0;
    for iz in 0..NB {
        for iy in 0..NB {
            for ix in 0..NB {
                let v = [vcell(ix), vcell(iy), vcell(iz)];
                let m = marginal[iz * NB * NB + iy * NB + ix];
                let w0 = (1.0 + norm(v)).powi(60);
                sum += (w0 * m) * (w0 * m) * dv.powi(3);
                // one v-derivative at one order lower in the hierarchy
                if ix > 0 && ix < NB - 1 {
                    let g = (marginal[iz * NB * NB + iy * NB + ix + 1]
                        - marginal[iz * NB * NB + iy * NB + ix - 1])
                        / (2.0 * dv);
                    let w1 = (1.0 + norm(v)).powi(50);
                    sum += (w1 * g) * (w1 * g) * dv.powi(3);
                }
            }
        }
    }
    sum.sqrt()
}

/// Conservation monitors accumulated over a run.
#[derive(Clone, Copy, Debug, Default)]
pub struct ConservationReport {
    pub charge_drift: f64,
    pub energy_drift: f64,
    pub gauss_max: f64,
    pub div_b_max: f64,
}

impl ConservationReport {
    pub fn update(
        &mut self,
        initial_charge: f64,
        charge: f64,
        initial_energy: f64,
        energy: f64,
        gauss: f64,
        div_b: f64,
    ) {
        if initial_charge != 0.0 {
            self.charge_drift = self
                .charge_drift
                .max(((charge - initial_charge) / initial_charge).abs());
        }
        if initial_energy != 0.0 {
            self.energy_drift = self
                .energy_drift
                .max(((energy - initial_energy) / initial_energy).abs());
        }
        self.gauss_max = self.gauss_max.max(gauss);
        self.div_b_max = self.div_b_max.max(div_b);
    }
}

/// Total energy: field + Σ w √(1+|v|²) (the Hamiltonian of the system).
pub fn total_energy(state: &FieldState, ensemble: &ParticleEnsemble) -> f64 {
    state.field_energy() + ensemble.kinetic_energy()
}

/// Σ w γ-free sanity helper used by tests.
pub fn mean_gamma(ensemble: &ParticleEnsemble) -> f64 {
    if ensemble.is_empty() {
        return 1.0;
    }
    ensemble.v.iter().map(|&v| gamma(v)).sum::<f64>() / ensemble.len() as f64
}
