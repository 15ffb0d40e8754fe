//! Analytic test functions of (t, x, v) with coded first derivatives.
//!
//! Two families back the verification suites: anisotropic Gaussians with an
//! optional affine prefactor, and free-transport solutions g(x − v̂t, v) built
//! from the same Gaussians. A handful of degenerate shapes (coordinate
//! functions, radial profiles) cover the hand-checkable cases.

use crate::geometry::frame::{hat_v, hat_v_jacobian};
use crate::rng::Rng;
use crate::{dot, Vec3};

/// Value and full first-order derivative data at a point.
#[derive(Clone, Copy, Debug)]
pub struct Jet {
    pub value: f64,
    pub d_t: f64,
    pub d_x: Vec3,
    pub d_v: Vec3,
}

/// (amplitude + affine prefactor) × anisotropic Gaussian over (t,x,v).
///
/// f = (c₀ + c_t t + c_x·x + c_v·v) · exp(−((t−t₀)/σ_t)² − Σ((x−a)/σ)² − Σ((v−b)/τ)²)
///
/// A non-finite width disables the corresponding coordinate entirely
/// (no decay and no derivative in it).
#[derive(Clone, Debug)]
pub struct Gaussian {
    pub center_t: f64,
    pub width_t: f64,
    pub center_x: Vec3,
    pub width_x: Vec3,
    pub center_v: Vec3,
    pub width_v: Vec3,
    pub affine: Affine,
}

#[derive(Clone, Copy, Debug)]
pub struct Affine {
    pub c0: f64,
    pub c_t: f64,
    pub c_x: Vec3,
    pub c_v: Vec3,
}

impl Affine {
    pub const ONE: Affine = Affine {
        c0: 1.0,
        c_t: 0.0,
        c_x: [0.0; 3],
        c_v: [0.0; 3],
    };
}

impl Gaussian {
    /// Isotropic unit Gaussian in x only (radial profile).
    pub fn radial_x(width: f64) -> Self {
        Gaussian {
            center_t: 0.0,
            width_t: f64::INFINITY,
            center_x: [0.0; 3],
            width_x: [width; 3],
            center_v: [0.0; 3],
            width_v: [f64::INFINITY; 3],
            affine: Affine::ONE,
        }
    }

    fn jet(&self, t: f64, x: Vec3, v: Vec3) -> Jet {
        let mut q = 0.0;
        let mut dq_t = 0.0;
        let mut dq_x = [0.0; 3];
        let mut dq_v = [0.0; 3];
        if self.width_t.is_finite() {
            let z = (t - self.center_t) / self.width_t;
            q += z * z;
            dq_t = 2.0 * z / self.width_t;
        }
        for i in 0..3 {
            if self.width_x[i].is_finite() {
                let z = (x[i] - self.center_x[i]) / self.width_x[i];
                q += z * z;
                dq_x[i] = 2.0 * z / self.width_x[i];
            }
            if self.width_v[i].is_finite() {
                let z = (v[i] - self.center_v[i]) / self.width_v[i];
                q += z * z;
                dq_v[i] = 2.0 * z / self.width_v[i];
            }
        }
        let e = (-q).exp();
        let a = &self.affine;
        let p = a.c0 + a.c_t * t + dot(a.c_x, x) + dot(a.c_v, v);
        let value = p * e;
        Jet {
            value,
            d_t: (a.c_t - p * dq_t) * e,
            d_x: [
                (a.c_x[0] - p * dq_x[0]) * e,
                (a.c_x[1] - p * dq_x[1]) * e,
                (a.c_x[2] - p * dq_x[2]) * e,
            ],
            d_v: [
                (a.c_v[0] - p * dq_v[0]) * e,
                (a.c_v[1] - p * dq_v[1]) * e,
                (a.c_v[2] - p * dq_v[2]) * e,
            ],
        }
    }
}

/// A test function with analytic first derivatives.
#[derive(Clone, Debug)]
pub enum TestFunction {
    Gaussian(Gaussian),
    /// g(x − v̂ t, v), a solution of ∂_t f + v̂·∇_x f = 0 for any profile g.
    Transport(Gaussian),
    /// f = t.
    CoordT,
    /// f = x_i.
    CoordX(usize),
}

impl TestFunction {
    pub fn value(&self, t: f64, x: Vec3, v: Vec3) -> f64 {
        self.jet(t, x, v).value
    }

    pub fn jet(&self, t: f64, x: Vec3, v: Vec3) -> Jet {
        match self {
            TestFunction::Gaussian(g) => g.jet(t, x, v),
            TestFunction::Transport(g) => {
                let vh = hat_v(v);
                let y = [x[0] - vh[0] * t, x[1] - vh[1] * t, x[2] - vh[2] * t];
                let inner = g.jet(0.0, y, v); // profile has no explicit t
                let j = hat_v_jacobian(v);
                let mut d_v = inner.d_v;
                for i in 0..3 {
                    for k in 0..3 {
                        d_v[i] -= t * j[i][k] * inner.d_x[k];
                    }
                }
                Jet {
                    value: inner.value,
                    d_t: -dot(vh, inner.d_x),
                    d_x: inner.d_x,
                    d_v,
                }
            }
            TestFunction::CoordT => Jet {
                value: t,
                d_t: 1.0,
                d_x: [0.0; 3],
                d_v: [0.0; 3],
            },
            TestFunction::CoordX(i) => {
                let mut d_x = [0.0; 3];
                d_x[*i] = 1.0;
                Jet {
                    value: x[*i],
                    d_t: 0.0,
                    d_x,
                    d_v: [0.0; 3],
                }
            }
        }
    }
}

/// The fixed 12-function corpus: anisotropic Gaussians with seeded centers in
/// [−1, 1] and widths in [1/2, 2]; the last half carry affine prefactors.
pub fn gaussian_corpus(seed: u64) -> Vec<Gaussian> {
    let mut rng = Rng::seed_from(seed);
    (0..12)
        .map(|k| {
            let affine = if k < 6 {
                Affine::ONE
            } else {
                Affine {
                    c0: rng.range(0.5, 1.5),
                    c_t: rng.range(-0.5, 0.5),
                    c_x: rng.vec3(-0.5, 0.5),
                    c_v: rng.vec3(-0.5, 0.5),
                }
            };
            Gaussian {
                center_t: rng.range(-1.0, 1.0),
                width_t: rng.range(0.5, 2.0),
                center_x: rng.vec3(-1.0, 1.0),
                width_x: [
                    rng.range(0.5, 2.0),
                    rng.range(0.5, 2.0),
                    rng.range(0.5, 2.0),
                ],
                center_v: rng.vec3(-1.0, 1.0),
                width_v: [
                    rng.range(0.5, 2.0),
                    rng.range(0.5, 2.0),
                    rng.range(0.5, 2.0),
                ],
                affine,
            }
        })
        .collect()
}

/// The same corpus packaged as free-transport solutions (profiles have no
/// explicit time dependence; the t-width is disabled).
pub fn transport_corpus(seed: u64) -> Vec<TestFunction> {
    gaussian_corpus(seed)
        .into_iter()
        .map(|mut g| {
            g.width_t = f64::INFINITY;
            TestFunction::Transport(g)
        })
        .collect()
}

/// Corpus as plain spacetime-phase-space Gaussians.
pub fn generic_corpus(seed: u64) -> Vec<TestFunction> {
    gaussian_corpus(seed)
        .into_iter()
        .map(TestFunction::Gaussian)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// every coded derivative agrees with a centered difference at O(h²)
    #[test]
    fn jets_match_centered_differences() {
        let h = 1e-5;
        let fns: Vec<TestFunction> = generic_corpus(9)
            .into_iter()
            .chain(transport_corpus(10))
            .chain([TestFunction::CoordT, TestFunction::CoordX(1)])
            .collect();
        let mut rng = Rng::seed_from(77);
        for f in &fns {
            for _ in 0..50 {
                let t = rng.range(-2.0, 2.0);
                let x = rng.vec3(-2.0, 2.0);
                let v = rng.vec3(-2.0, 2.0);
                let jet = f.jet(t, x, v);
                let fd_t = (f.value(t + h, x, v) - f.value(t - h, x, v)) / (2.0 * h);
                assert!((fd_t - jet.d_t).abs() < 1e-7, "d_t mismatch");
                for i in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[i] += h;
                    xm[i] -= h;
                    let fd = (f.value(t, xp, v) - f.value(t, xm, v)) / (2.0 * h);
                    assert!((fd - jet.d_x[i]).abs() < 1e-7, "d_x mismatch");
                    let mut vp = v;
                    let mut vm = v;
                    vp[i] += h;
                    vm[i] -= h;
                    let fd = (f.value(t, x, vp) - f.value(t, x, vm)) / (2.0 * h);
                    assert!((fd - jet.d_v[i]).abs() < 1e-7, "d_v mismatch");
                }
            }
        }
    }

    /// transport profiles solve ∂_t f + v̂·∇_x f = 0 identically
    #[test]
    fn transport_solutions_annihilated() {
        let mut rng = Rng::seed_from(4);
        for f in transport_corpus(11) {
            for _ in 0..100 {
                let t = rng.range(-3.0, 3.0);
                let x = rng.vec3(-3.0, 3.0);
                let v = rng.vec3(-3.0, 3.0);
                let jet = f.jet(t, x, v);
                let tf = jet.d_t + dot(hat_v(v), jet.d_x);
                assert!(tf.abs() < 1e-14, "transport residual {tf}");
            }
        }
    }
}
