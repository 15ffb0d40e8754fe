//! Electromagnetic field state on a periodic cube, evolved pseudo-spectrally.
//!
//! The spectral arrays are the state of record; real-space views are derived
//! on demand and invalidated by any spectral mutation. Free evolution is the
//! exact per-mode rotation generated by ∂_t Ê = iξ×B̂, ∂_t B̂ = −iξ×Ê (the
//! half-wave phases e^{∓i|ξ|dt}), so a vacuum step is unitary to roundoff;
//! sources enter as an impulsive current kick between two half rotations.

use crate::error::{Error, Result};
use crate::fft::{freq, idx, Fft3};
use crate::{dot, norm, Vec3};
use num_complex::Complex64;

/// Uniform periodic cube: n³ points, side length `length` (code units).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Self {
        assert!(n.is_power_of_two(), "grid size must be a power of two");
        assert!(length > 0.0);
        Grid { n, length }
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Frequency vector of the FFT bin (ix, iy, iz).
    #[inline]
    pub fn xi(&self, ix: usize, iy: usize, iz: usize) -> Vec3 {
        [
            freq(self.n, self.length, ix),
            freq(self.n, self.length, iy),
            freq(self.n, self.length, iz),
        ]
    }

    /// Iterate (flat index, bin triple) over all lattice points.
    pub fn bins(&self) -> impl Iterator<Item = (usize, (usize, usize, usize))> + '_ {
        let n = self.n;
        (0..n).flat_map(move |iz| {
            (0..n).flat_map(move |iy| {
                (0..n).map(move |ix| (idx(n, ix, iy, iz), (ix, iy, iz)))
            })
        })
    }
}

/// Real-space view of the fields.
#[derive(Clone, Debug)]
pub struct RealFields {
    pub e: [Vec<f64>; 3],
    pub b: [Vec<f64>; 3],
}

/// Deposited source moments in spectral form (ρ̂, ĵ), with the 4π of the
/// field equations already folded in.
#[derive(Clone, Debug)]
pub struct SourceSpectra {
    pub rho: Vec<Complex64>,
    pub j: [Vec<Complex64>; 3],
}

impl SourceSpectra {
    pub fn zero(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.cells()];
        SourceSpectra {
            rho: z.clone(),
            j: [z.clone(), z.clone(), z],
        }
    }
}

pub struct FieldState {
    pub grid: Grid,
    pub time: f64,
    pub e_hat: [Vec<Complex64>; 3],
    pub b_hat: [Vec<Complex64>; 3],
    real_cache: Option<RealFields>,
}

impl FieldState {
    pub fn zero(grid: Grid) -> Self {
        let z = vec![Complex64::default(); grid.cells()];
        FieldState {
            grid,
            time: 0.0,
            e_hat: [z.clone(), z.clone(), z.clone()],
            b_hat: [z.clone(), z.clone(), z],
            real_cache: None,
        }
    }

    /// Build from real arrays (forward transforms all six components).
    pub fn from_real(grid: Grid, time: f64, fields: RealFields, fft: &mut Fft3) -> Self {
        let mut state = FieldState::zero(grid);
        state.time = time;
        for c in 0..3 {
            state.e_hat[c] = to_spectral(&fields.e[c], fft);
            state.b_hat[c] = to_spectral(&fields.b[c], fft);
        }
        state.real_cache = Some(fields);
        state
    }

    pub fn invalidate_real(&mut self) {
        self.real_cache = None;
    }

    /// Real-space fields, computed once per spectral mutation.
    pub fn real(&mut self, fft: &mut Fft3) -> &RealFields {
        if self.real_cache.is_none() {
            let mut out = RealFields {
                e: [vec![], vec![], vec![]],
                b: [vec![], vec![], vec![]],
            };
            for c in 0..3 {
                out.e[c] = to_real(&self.e_hat[c], fft);
                out.b[c] = to_real(&self.b_hat[c], fft);
            }
            self.real_cache = Some(out);
        }
        self.real_cache.as_ref().unwrap()
    }

    /// Exact free Maxwell evolution by dt (any sign); the zero mode is fixed.
    pub fn propagate_free(&mut self, dt: f64) {
        let grid = self.grid;
        for (flat, (ix, iy, iz)) in grid.bins() {
            if (ix, iy, iz) == (0, 0, 0) {
                continue;
            }
            let xi = grid.xi(ix, iy, iz);
            let k = norm(xi);
            let k_dir = crate::scale(xi, 1.0 / k);
            let (s, c) = (k * dt).sin_cos();
            let e: [Complex64; 3] = [
                self.e_hat[0][flat],
                self.e_hat[1][flat],
                self.e_hat[2][flat],
            ];
            let b: [Complex64; 3] = [
                self.b_hat[0][flat],
                self.b_hat[1][flat],
                self.b_hat[2][flat],
            ];
            let e_l = cproj(&e, k_dir);
            let b_l = cproj(&b, k_dir);
            let e_t = [e[0] - e_l[0], e[1] - e_l[1], e[2] - e_l[2]];
            let b_t = [b[0] - b_l[0], b[1] - b_l[1], b[2] - b_l[2]];
            let kxb = ccross(k_dir, &b_t);
            let kxe = ccross(k_dir, &e_t);
            let i = Complex64::new(0.0, 1.0);
            for d in 0..3 {
                self.e_hat[d][flat] = e_l[d] + e_t[d] * c + i * kxb[d] * s;
                self.b_hat[d][flat] = b_l[d] + b_t[d] * c - i * kxe[d] * s;
            }
        }
        self.time += dt;
        self.invalidate_real();
    }

    /// Impulsive current kick Ê ← Ê − ĵ dt (the ĵ carries its 4π already).
    /// B is untouched by sources. Refuses dt beyond the light-crossing of a
    /// cell, where the splitting has no business being trusted.
    pub fn apply_sources(&mut self, src: &SourceSpectra, dt: f64) -> Result<()> {
        if dt > self.grid.dx() {
            return Err(Error::InvalidConfig(format!(
                "source kick dt = {dt} exceeds the cell crossing time dx = {}",
                self.grid.dx()
            )));
        }
        for c in 0..3 {
            for (e, j) in self.e_hat[c].iter_mut().zip(&src.j[c]) {
                *e -= j * dt;
            }
        }
        self.invalidate_real();
        Ok(())
    }

    /// ∂_t Ê = iξ×B̂ − ĵ on the lattice (for profile extraction).
    pub fn e_dot_hat(&self, src: &SourceSpectra) -> [Vec<Complex64>; 3] {
        let grid = self.grid;
        let mut out = [
            vec![Complex64::default(); grid.cells()],
            vec![Complex64::default(); grid.cells()],
            vec![Complex64::default(); grid.cells()],
        ];
        let i = Complex64::new(0.0, 1.0);
        for (flat, (ix, iy, iz)) in grid.bins() {
            let xi = grid.xi(ix, iy, iz);
            let b = [
                self.b_hat[0][flat],
                self.b_hat[1][flat],
                self.b_hat[2][flat],
            ];
            let curl = ccross(xi, &b);
            for d in 0..3 {
                out[d][flat] = i * curl[d] - src.j[d][flat];
            }
        }
        out
    }

    /// ∂_t B̂ = −iξ×Ê on the lattice.
    pub fn b_dot_hat(&self) -> [Vec<Complex64>; 3] {
        let grid = self.grid;
        let mut out = [
            vec![Complex64::default(); grid.cells()],
            vec![Complex64::default(); grid.cells()],
            vec![Complex64::default(); grid.cells()],
        ];
        let i = Complex64::new(0.0, 1.0);
        for (flat, (ix, iy, iz)) in grid.bins() {
            let xi = grid.xi(ix, iy, iz);
            let e = [
                self.e_hat[0][flat],
                self.e_hat[1][flat],
                self.e_hat[2][flat],
            ];
            let curl = ccross(xi, &e);
            for d in 0..3 {
                out[d][flat] = -i * curl[d];
            }
        }
        out
    }

    /// ‖ξ·Ê − ρ̂‖₂ / max(‖ρ̂‖₂, ε) over nonzero modes: the Gauss-law monitor
    /// ∇·E = ρ (ρ carries its 4π; the zero mode lives on the neutralizing
    /// background and is excluded).
    pub fn gauss_residual(&self, rho_hat: &[Complex64]) -> f64 {
        let grid = self.grid;
        let mut num = 0.0;
        let mut den = 0.0;
        let i = Complex64::new(0.0, 1.0);
        for (flat, (ix, iy, iz)) in grid.bins() {
            if (ix, iy, iz) == (0, 0, 0) {
                continue;
            }
            let xi = grid.xi(ix, iy, iz);
            let dive = i
                * (xi[0] * self.e_hat[0][flat]
                    + xi[1] * self.e_hat[1][flat]
                    + xi[2] * self.e_hat[2][flat]);
            num += (dive - rho_hat[flat]).norm_sqr();
            den += rho_hat[flat].norm_sqr();
        }
        num.sqrt() / den.sqrt().max(1e-300)
    }

    /// ‖ξ·B̂‖₂ / max(‖B̂‖₂·⟨|ξ|⟩, ε): the ∇·B = 0 monitor.
    pub fn div_b_residual(&self) -> f64 {
        let grid = self.grid;
        let mut num = 0.0;
        let mut den = 0.0;
        for (flat, (ix, iy, iz)) in grid.bins() {
            if (ix, iy, iz) == (0, 0, 0) {
                continue;
            }
            let xi = grid.xi(ix, iy, iz);
            let divb = xi[0] * self.b_hat[0][flat]
                + xi[1] * self.b_hat[1][flat]
                + xi[2] * self.b_hat[2][flat];
            num += divb.norm_sqr();
            let k = norm(xi);
            den += (self.b_hat[0][flat].norm_sqr()
                + self.b_hat[1][flat].norm_sqr()
                + self.b_hat[2][flat].norm_sqr())
                * k
                * k;
        }
        if den == 0.0 {
            0.0
        } else {
            (num / den).sqrt()
        }
    }

    /// Field energy (1/8π) ∫ (|E|² + |B|²) dx via Parseval.
    pub fn field_energy(&self) -> f64 {
        let grid = self.grid;
        let vol = grid.length.powi(3);
        let n6 = (grid.cells() as f64) * (grid.cells() as f64);
        let mut sum = 0.0;
        for c in 0..3 {
            for z in &self.e_hat[c] {
                sum += z.norm_sqr();
            }
            for z in &self.b_hat[c] {
                sum += z.norm_sqr();
            }
        }
        sum * vol / n6 / (8.0 * std::f64::consts::PI)
    }

    /// Spectral L² mass of the transverse field, exactly conserved by
    /// free propagation.
    pub fn spectral_l2(&self) -> f64 {
        let mut sum = 0.0;
        for c in 0..3 {
            for z in &self.e_hat[c] {
                sum += z.norm_sqr();
            }
            for z in &self.b_hat[c] {
                sum += z.norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Max |E| over grid points.
    pub fn max_abs_e(&mut self, fft: &mut Fft3) -> f64 {
        let r = self.real(fft);
        let mut m = 0.0f64;
        for i in 0..r.e[0].len() {
            let e = [r.e[0][i], r.e[1][i], r.e[2][i]];
            m = m.max(dot(e, e));
        }
        m.sqrt()
    }

    /// Trilinear sample of (E, B) at a physical position.
    pub fn sample(&mut self, pos: Vec3, fft: &mut Fft3) -> (Vec3, Vec3) {
        let grid = self.grid;
        let r = self.real(fft);
        (
            trilinear(grid, &r.e, pos),
            trilinear(grid, &r.b, pos),
        )
    }
}

/// Trilinear interpolation of a 3-component grid field at a position
/// (periodic wrap).
pub fn trilinear(grid: Grid, field: &[Vec<f64>; 3], pos: Vec3) -> Vec3 {
    let n = grid.n;
    let dx = grid.dx();
    let mut base = [0usize; 3];
    let mut frac = [0.0f64; 3];
    for d in 0..3 {
        let s = pos[d] / dx;
        let f = s.floor();
        base[d] = (f.rem_euclid(n as f64)) as usize % n;
        frac[d] = s - f;
    }
    let mut out = [0.0; 3];
    for corner in 0..8 {
        let ox = corner & 1;
        let oy = (corner >> 1) & 1;
        let oz = (corner >> 2) & 1;
        let w = (if ox == 1 { frac[0] } else { 1.0 - frac[0] })
            * (if oy == 1 { frac[1] } else { 1.0 - frac[1] })
            * (if oz == 1 { frac[2] } else { 1.0 - frac[2] });
        let flat = idx(
            n,
            (base[0] + ox) % n,
            (base[1] + oy) % n,
            (base[2] + oz) % n,
        );
        for c in 0..3 {
            out[c] += w * field[c][flat];
        }
    }
    out
}

pub fn to_spectral(real: &[f64], fft: &mut Fft3) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = real.iter().map(|&r| Complex64::new(r, 0.0)).collect();
    fft.forward(&mut buf);
    buf
}

pub fn to_real(spec: &[Complex64], fft: &mut Fft3) -> Vec<f64> {
    let mut buf = spec.to_vec();
    fft.inverse(&mut buf);
    buf.iter().map(|z| z.re).collect()
}

#[inline]
fn cproj(u: &[Complex64; 3], dir: Vec3) -> [Complex64; 3] {
    let p = u[0] * dir[0] + u[1] * dir[1] + u[2] * dir[2];
    [p * dir[0], p * dir[1], p * dir[2]]
}

#[inline]
fn ccross(a: Vec3, b: &[Complex64; 3]) -> [Complex64; 3] {
    [
        b[2] * a[1] - b[1] * a[2],
        b[0] * a[2] - b[2] * a[0],
        b[1] * a[0] - b[0] * a[1],
    ]
}
