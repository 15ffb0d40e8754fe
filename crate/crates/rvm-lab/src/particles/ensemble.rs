//! Particle discretization of the distribution function: positions in the
//! box, momenta (units m = c = 1, so v̂ = v/√(1+|v|²) is the velocity), and
//! statistical weights.
//!
//! The momentum push splits electric half-kicks around an exact rotation
//! about B (angle dt|B|/√(1+|v|²)), so a pure magnetic field preserves
//! √(1+|v|²) to roundoff. The position push is ẋ = v̂ with periodic wrap.

use crate::geometry::frame::{gamma, hat_v};
use crate::maxwell::state::{trilinear, Grid, RealFields};
use crate::rng::{box_muller, halton6};
use crate::{add, cross, dot, norm, scale, Vec3};

#[derive(Clone, Debug)]
pub struct ParticleEnsemble {
    pub length: f64,
    pub x: Vec<Vec3>,
    pub v: Vec<Vec3>,
    pub w: Vec<f64>,
}

/// The Gaussian phase-space data f₀(x,v) = ε exp(−|x−x_c|²/σ_x² − |v|²/σ_v²).
#[derive(Clone, Copy, Debug)]
pub struct GaussianPhaseSpace {
    pub amplitude: f64,
    pub center: Vec3,
    pub sigma_x: f64,
    pub sigma_v: f64,
}

impl GaussianPhaseSpace {
    pub fn spatial(&self, y: Vec3) -> f64 {
        let d = crate::sub(y, self.center);
        self.amplitude * (-dot(d, d) / (self.sigma_x * self.sigma_x)).exp()
    }

    pub fn spatial_gradient(&self, y: Vec3) -> Vec3 {
        let d = crate::sub(y, self.center);
        scale(d, -2.0 / (self.sigma_x * self.sigma_x) * self.spatial(y))
    }

    pub fn velocity(&self, v: Vec3) -> f64 {
        (-dot(v, v) / (self.sigma_v * self.sigma_v)).exp()
    }

    /// ∫ f₀ dx dv = ε π³ σ_x³ σ_v³.
    pub fn total_mass(&self) -> f64 {
        self.amplitude * std::f64::consts::PI.powi(3) * self.sigma_x.powi(3) * self.sigma_v.powi(3)
    }
}

impl ParticleEnsemble {
    pub fn empty(length: f64) -> Self {
        ParticleEnsemble {
            length,
            x: vec![],
            v: vec![],
            w: vec![],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Deterministic low-discrepancy Gaussian loading: the Halton stream
    /// (bases 2..13) drives Box-Muller pairs, so a given count reproduces the
    /// same phase-space points forever. The per-axis standard deviation is
    /// σ/√2, matching exp(−|·|²/σ²) as a density. All particles carry the
    /// same weight, summing to the mass of f₀. `seed` offsets the stream.
    pub fn gaussian(length: f64, data: &GaussianPhaseSpace, count: usize, seed: u64) -> Self {
        let mut e = ParticleEnsemble::empty(length);
        let sx = data.sigma_x / 2f64.sqrt();
        let sv = data.sigma_v / 2f64.sqrt();
        let w = data.total_mass() / count as f64;
        e.x.reserve(count);
        e.v.reserve(count);
        e.w.reserve(count);
        for p in 0..count {
            let u = halton6(p as u64 + 1 + seed);
            let (z0, z1) = box_muller(u[0], u[1]);
            let (z2, z3) = box_muller(u[2], u[3]);
            let (z4, z5) = box_muller(u[4], u[5]);
            let x = [
                wrap(data.center[0] + sx * z0, length),
                wrap(data.center[1] + sx * z1, length),
                wrap(data.center[2] + sx * z2, length),
            ];
            e.x.push(x);
            e.v.push([sv * z3, sv * z4, sv * z5]);
            e.w.push(w);
        }
        e
    }

    /// Total statistical weight; constant for all time (no creation or loss).
    pub fn total_weight(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Σ w √(1+|v|²), the particle part of the conserved energy.
    pub fn kinetic_energy(&self) -> f64 {
        self.v
            .iter()
            .zip(&self.w)
            .map(|(&v, &w)| w * gamma(v))
            .sum()
    }

    /// x ← x + v̂ dt, wrapped into [0, L); every displacement is < dt.
    pub fn push_position(&mut self, dt: f64) {
        let length = self.length;
        for (x, &v) in self.x.iter_mut().zip(&self.v) {
            let vh = hat_v(v);
            for d in 0..3 {
                x[d] = wrap(x[d] + vh[d] * dt, length);
            }
        }
    }

    /// Boris-style momentum update with per-particle sampled fields.
    pub fn push_momentum(&mut self, e_at: &[Vec3], b_at: &[Vec3], dt: f64) {
        for i in 0..self.v.len() {
            self.v[i] = boris_push(self.v[i], e_at[i], b_at[i], dt);
        }
    }

    /// Gather (E, B) at every particle with the same trilinear shapes the
    /// deposit uses (momentum-conservation pairing).
    pub fn gather_fields(&self, grid: Grid, fields: &RealFields) -> (Vec<Vec3>, Vec<Vec3>) {
        let mut e = Vec::with_capacity(self.len());
        let mut b = Vec::with_capacity(self.len());
        for &x in &self.x {
            e.push(trilinear(grid, &fields.e, x));
            b.push(trilinear(grid, &fields.b, x));
        }
        (e, b)
    }
}

/// Half electric kick, exact magnetic rotation, half electric kick.
pub fn boris_push(v: Vec3, e: Vec3, b: Vec3, dt: f64) -> Vec3 {
    let v_minus = add(v, scale(e, 0.5 * dt));
    let bmag = norm(b);
    let v_rot = if bmag > 0.0 {
        let axis = scale(b, 1.0 / bmag);
        let theta = dt * bmag / gamma(v_minus);
        // dv/dt = v̂×B rotates v about −B̂; Rodrigues with angle −θ about B̂
        let (s, c) = theta.sin_cos();
        let axv = cross(axis, v_minus);
        let along = dot(axis, v_minus);
        [
            v_minus[0] * c - axv[0] * s + axis[0] * along * (1.0 - c),
            v_minus[1] * c - axv[1] * s + axis[1] * along * (1.0 - c),
            v_minus[2] * c - axv[2] * s + axis[2] * along * (1.0 - c),
        ]
    } else {
        v_minus
    };
    add(v_rot, scale(e, 0.5 * dt))
}

#[inline]
pub fn wrap(x: f64, length: f64) -> f64 {
    let r = x.rem_euclid(length);
    if r == length {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_kick_and_rest() {
        let v = boris_push([0.2, 0.0, 0.0], [0.0; 3], [0.0; 3], 0.5);
        assert_eq!(v, [0.2, 0.0, 0.0]);
        // constant E along e₁: Δv₁ = E dt exactly
        let v = boris_push([0.1, 0.3, -0.2], [2.0, 0.0, 0.0], [0.0; 3], 0.25);
        assert!((v[0] - (0.1 + 0.5)).abs() < 1e-15);
        assert_eq!(v[1], 0.3);
    }

    #[test]
    fn magnetic_rotation_preserves_energy_exactly() {
        let b = [0.0, 0.0, 1.7];
        let mut v = [0.8, 0.0, 0.3];
        let g0 = gamma(v);
        for _ in 0..10_000 {
            v = boris_push(v, [0.0; 3], b, 0.05);
        }
        assert!(
            (gamma(v) - g0).abs() < 1e-12,
            "γ drifted by {}",
            gamma(v) - g0
        );
    }

    #[test]
    fn gyration_frequency_matches_relativistic_rate() {
        // in B = B₀ e₃ the momentum rotates at rate B₀/√(1+|v|²)
        let b0 = 1.3;
        let v0 = [0.9, 0.0, 0.0];
        let g = gamma(v0);
        let dt = 1e-3;
        let steps = 4000;
        let mut v = v0;
        for _ in 0..steps {
            v = boris_push(v, [0.0; 3], [0.0, 0.0, b0], dt);
        }
        let expect = -b0 / g * dt * steps as f64; // rotation sense: about −B̂
        let angle = v[1].atan2(v[0]);
        let wrap_diff = (angle - expect).rem_euclid(2.0 * std::f64::consts::PI);
        let err = wrap_diff.min(2.0 * std::f64::consts::PI - wrap_diff);
        assert!(err < 1e-10, "gyration phase error {err}");
    }

    #[test]
    fn position_push_subluminal_and_exact() {
        let mut e = ParticleEnsemble::empty(64.0);
        e.x.push([1.0, 2.0, 3.0]);
        e.v.push([1.0, 0.0, 0.0]);
        e.w.push(1.0);
        e.push_position(2f64.sqrt());
        assert!((e.x[0][0] - 2.0).abs() < 1e-14, "v̂ = 1/√2 drift");
        // rest particle stays put; all displacements stay below dt
        let mut e = ParticleEnsemble::empty(8.0);
        for k in 0..100 {
            e.x.push([4.0, 4.0, 4.0]);
            e.v.push([k as f64 * 0.3, -(k as f64) * 0.1, 1.0]);
            e.w.push(1.0);
        }
        let before = e.x.clone();
        let dt = 0.5;
        e.push_position(dt);
        for (a, b) in e.x.iter().zip(&before) {
            let mut d = [0.0; 3];
            for c in 0..3 {
                let mut diff = a[c] - b[c];
                if diff > 4.0 {
                    diff -= 8.0;
                }
                if diff < -4.0 {
                    diff += 8.0;
                }
                d[c] = diff;
            }
            assert!(norm(d) < dt, "displacement {} ≥ dt", norm(d));
        }
    }

    #[test]
    fn gather_is_exact_on_affine_and_second_order_on_waves() {
        use crate::fft::idx;
        use crate::maxwell::state::{Grid, RealFields};
        // uniform and affine fields gather exactly; a plane wave's gather
        // error drops ~4x when the grid is refined 2x
        let sample_points: Vec<crate::Vec3> = {
            let mut rng = crate::rng::Rng::seed_from(31);
            (0..200).map(|_| rng.vec3(4.0, 12.0)).collect()
        };
        let wave_err = |n: usize| -> f64 {
            let grid = Grid::new(n, 16.0);
            let k = 2.0 * std::f64::consts::PI * 2.0 / grid.length;
            let mut e1 = vec![0.0; grid.cells()];
            for iz in 0..n {
                for iy in 0..n {
                    for ix in 0..n {
                        e1[idx(n, ix, iy, iz)] = (k * ix as f64 * grid.dx()).sin();
                    }
                }
            }
            let zero = vec![0.0; grid.cells()];
            let fields = RealFields {
                e: [e1, zero.clone(), zero.clone()],
                b: [zero.clone(), zero.clone(), zero],
            };
            let mut ens = ParticleEnsemble::empty(grid.length);
            for &p in &sample_points {
                ens.x.push(p);
                ens.v.push([0.0; 3]);
                ens.w.push(1.0);
            }
            let (e_at, _) = ens.gather_fields(grid, &fields);
            sample_points
                .iter()
                .zip(&e_at)
                .map(|(p, e)| (e[0] - (k * p[0]).sin()).abs())
                .fold(0.0f64, f64::max)
        };
        let coarse = wave_err(16);
        let fine = wave_err(32);
        assert!(
            fine < 0.35 * coarse,
            "gather not second order: {coarse} -> {fine}"
        );
        // uniform field gathers exactly
        let grid = Grid::new(8, 16.0);
        let fields = RealFields {
            e: [
                vec![3.25; grid.cells()],
                vec![-1.5; grid.cells()],
                vec![0.75; grid.cells()],
            ],
            b: [
                vec![0.5; grid.cells()],
                vec![0.0; grid.cells()],
                vec![-2.0; grid.cells()],
            ],
        };
        let mut ens = ParticleEnsemble::empty(grid.length);
        ens.x.push([3.21, 7.77, 11.3]);
        ens.v.push([0.0; 3]);
        ens.w.push(1.0);
        let (e_at, b_at) = ens.gather_fields(grid, &fields);
        assert!((e_at[0][0] - 3.25).abs() < 1e-13);
        assert!((b_at[0][2] + 2.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_loading_moments() {
        let data = GaussianPhaseSpace {
            amplitude: 1e-3,
            center: [32.0, 32.0, 32.0],
            sigma_x: 3.0,
            sigma_v: 0.8,
        };
        let e = ParticleEnsemble::gaussian(64.0, &data, 40_000, 0);
        assert_eq!(e.len(), 40_000);
        assert!((e.total_weight() - data.total_mass()).abs() < 1e-12 * data.total_mass());
        // sample variance of each coordinate ≈ σ²/2
        for d in 0..3 {
            let mean: f64 = e.x.iter().map(|x| x[d]).sum::<f64>() / e.len() as f64;
            assert!((mean - 32.0).abs() < 0.05, "x mean off: {mean}");
            let var: f64 =
                e.x.iter().map(|x| (x[d] - mean) * (x[d] - mean)).sum::<f64>() / e.len() as f64;
            assert!((var - 4.5).abs() < 0.1, "x var off: {var}");
            let vvar: f64 = e.v.iter().map(|v| v[d] * v[d]).sum::<f64>() / e.len() as f64;
            assert!((vvar - 0.32).abs() < 0.01, "v var off: {vvar}");
        }
        // determinism
        let e2 = ParticleEnsemble::gaussian(64.0, &data, 40_000, 0);
        assert_eq!(e.x, e2.x);
        assert_eq!(e.v, e2.v);
    }
}
