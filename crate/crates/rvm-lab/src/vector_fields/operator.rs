//! First-order differential operators a·∇_x + b·∇_v + c ∂_t given by
//! coefficient closures, and the concrete families acting on distribution
//! functions and profiles.
//!
//! Classic family (commutes with the wave operator / free transport):
//! scaling S = t∂_t + x·∇_x, rotations Ω_i = (e_i×x)·∇_x, Lorentz boosts
//! L_i = t∂_{x_i} + x_i∂_t, their kinetic companions Ω̃_i = Ω_i + (e_i×v)·∇_v
//! and L̃_i = L_i + √(1+|v|²)∂_{v_i}, and plain ∂_{x_i}.
//!
//! Light-cone family for profiles: K_v = ∇_v − √(1+|v|²) ω(x,v) ∇_v v̂·∇_x,
//! its pullback K̃_v (which commutes with ∂_t + v̂·∇_x exactly), the split
//! directions S^v, S^x, Ω^v_i, Ω^x_i, the good derivatives Ŝ^v = ṽ·K_v,
//! Ω̂^v_i = Ṽ_i·K_v, and the seventeen cutoff-localized slots combining them.

use crate::geometry::cutoff::SmoothCutoff;
use crate::geometry::frame::{frame_vectors, gamma, hat_v, hat_v_jacobian};
use crate::geometry::modulation::omega_good_unknown;
use crate::vector_fields::testfn::{Jet, TestFunction};
use crate::{basis, cross, dot, norm, scale, Vec3};

const PSI: SmoothCutoff = SmoothCutoff;

/// Coefficients of c ∂_t + a·∇_x + b·∇_v at a point.
#[derive(Clone, Copy, Debug, Default)]
pub struct Coefficients {
    pub c_t: f64,
    pub c_x: Vec3,
    pub c_v: Vec3,
}

pub struct DifferentialOperator {
    pub name: String,
    coeff: Box<dyn Fn(f64, Vec3, Vec3) -> Coefficients + Send + Sync>,
}

impl DifferentialOperator {
    pub fn new(
        name: impl Into<String>,
        coeff: impl Fn(f64, Vec3, Vec3) -> Coefficients + Send + Sync + 'static,
    ) -> Self {
        DifferentialOperator {
            name: name.into(),
            coeff: Box::new(coeff),
        }
    }

    pub fn coefficients(&self, t: f64, x: Vec3, v: Vec3) -> Coefficients {
        (self.coeff)(t, x, v)
    }

    /// Apply to a test function using its analytic derivatives.
    pub fn apply(&self, f: &TestFunction, t: f64, x: Vec3, v: Vec3) -> f64 {
        self.apply_jet(&f.jet(t, x, v), t, x, v)
    }

    /// Apply to explicit derivative data.
    pub fn apply_jet(&self, jet: &Jet, t: f64, x: Vec3, v: Vec3) -> f64 {
        let c = self.coefficients(t, x, v);
        c.c_t * jet.d_t + dot(c.c_x, jet.d_x) + dot(c.c_v, jet.d_v)
    }

    /// Apply to an arbitrary scalar function via 4th-order centered
    /// differences in each coordinate the operator actually uses.
    pub fn apply_fd(
        &self,
        g: &dyn Fn(f64, Vec3, Vec3) -> f64,
        t: f64,
        x: Vec3,
        v: Vec3,
        h: f64,
    ) -> f64 {
        let c = self.coefficients(t, x, v);
        let mut out = 0.0;
        if c.c_t != 0.0 {
            out += c.c_t * stencil4(|s| g(t + s, x, v), h);
        }
        for i in 0..3 {
            if c.c_x[i] != 0.0 {
                out += c.c_x[i]
                    * stencil4(
                        |s| {
                            let mut xs = x;
                            xs[i] += s;
                            g(t, xs, v)
                        },
                        h,
                    );
            }
            if c.c_v[i] != 0.0 {
                out += c.c_v[i]
                    * stencil4(
                        |s| {
                            let mut vs = v;
                            vs[i] += s;
                            g(t, x, vs)
                        },
                        h,
                    );
            }
        }
        out
    }

    /// Multiply all coefficients by a scalar cutoff χ(t,x,v).
    pub fn localized(
        self,
        name: impl Into<String>,
        chi: impl Fn(f64, Vec3, Vec3) -> f64 + Send + Sync + 'static,
    ) -> Self {
        let inner = self.coeff;
        DifferentialOperator {
            name: name.into(),
            coeff: Box::new(move |t, x, v| {
                let s = chi(t, x, v);
                if s == 0.0 {
                    return Coefficients::default();
                }
                let c = inner(t, x, v);
                Coefficients {
                    c_t: s * c.c_t,
                    c_x: scale(c.c_x, s),
                    c_v: scale(c.c_v, s),
                }
            }),
        }
    }
}

/// 4th-order centered first derivative: (−g(2h) + 8g(h) − 8g(−h) + g(−2h)) / 12h.
#[inline]
pub fn stencil4(g: impl Fn(f64) -> f64, h: f64) -> f64 {
    (-g(2.0 * h) + 8.0 * g(h) - 8.0 * g(-h) + g(-2.0 * h)) / (12.0 * h)
}

// ---------------------------------------------------------------------------
// classic family
// ---------------------------------------------------------------------------

/// S = t ∂_t + x·∇_x.
pub fn scaling() -> DifferentialOperator {
    DifferentialOperator::new("S", |t, x, _| Coefficients {
        c_t: t,
        c_x: x,
        c_v: [0.0; 3],
    })
}

/// Ω_i = (e_i × x)·∇_x.
pub fn rotation(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("Omega_{}", i + 1), move |_, x, _| Coefficients {
        c_t: 0.0,
        c_x: cross(basis(i), x),
        c_v: [0.0; 3],
    })
}

/// Ω̃_i = (e_i × x)·∇_x + (e_i × v)·∇_v.
pub fn rotation_tilde(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("OmegaTilde_{}", i + 1), move |_, x, v| Coefficients {
        c_t: 0.0,
        c_x: cross(basis(i), x),
        c_v: cross(basis(i), v),
    })
}

/// L_i = t ∂_{x_i} + x_i ∂_t.
pub fn lorentz(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("L_{}", i + 1), move |t, x, _| Coefficients {
        c_t: x[i],
        c_x: scale(basis(i), t),
        c_v: [0.0; 3],
    })
}

/// L̃_i = L_i + √(1+|v|²) ∂_{v_i}.
pub fn lorentz_tilde(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("LTilde_{}", i + 1), move |t, x, v| Coefficients {
        c_t: x[i],
        c_x: scale(basis(i), t),
        c_v: scale(basis(i), gamma(v)),
    })
}

pub fn partial_x(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("d_x{}", i + 1), move |_, _, _| Coefficients {
        c_t: 0.0,
        c_x: basis(i),
        c_v: [0.0; 3],
    })
}

pub fn partial_v(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("d_v{}", i + 1), move |_, _, _| Coefficients {
        c_t: 0.0,
        c_x: [0.0; 3],
        c_v: basis(i),
    })
}

/// The free-transport operator ∂_t + v̂·∇_x.
pub fn transport() -> DifferentialOperator {
    DifferentialOperator::new("transport", |_, _, v| Coefficients {
        c_t: 1.0,
        c_x: hat_v(v),
        c_v: [0.0; 3],
    })
}

// ---------------------------------------------------------------------------
// light-cone family (applied to profiles g(t,x,v))
// ---------------------------------------------------------------------------

/// K_{v_i} = ∂_{v_i} − √(1+|v|²) ω(x,v) (∂_{v_i} v̂)·∇_x.
pub fn k_v(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("K_v{}", i + 1), move |_, x, v| {
        let om = omega_good_unknown(x, v);
        let j = hat_v_jacobian(v);
        Coefficients {
            c_t: 0.0,
            c_x: scale(j[i], -gamma(v) * om),
            c_v: basis(i),
        }
    })
}

/// K̃_{v_i} = ∂_{v_i} + (t − √(1+|v|²) ω(x − v̂t, v)) (∂_{v_i} v̂)·∇_x,
/// the pullback of K_{v_i} along free transport; commutes with ∂_t + v̂·∇_x.
pub fn k_v_tilde(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("KTilde_v{}", i + 1), move |t, x, v| {
        let vh = hat_v(v);
        let y = [x[0] - vh[0] * t, x[1] - vh[1] * t, x[2] - vh[2] * t];
        let om = omega_good_unknown(y, v);
        let j = hat_v_jacobian(v);
        Coefficients {
            c_t: 0.0,
            c_x: scale(j[i], t - gamma(v) * om),
            c_v: basis(i),
        }
    })
}

/// S^v = ṽ·∇_v (zero coefficients at the degenerate point v = 0).
pub fn s_v() -> DifferentialOperator {
    DifferentialOperator::new("S^v", |_, _, v| match frame_vectors(v) {
        Ok(f) => Coefficients {
            c_t: 0.0,
            c_x: [0.0; 3],
            c_v: f.v_dir,
        },
        Err(_) => Coefficients::default(),
    })
}

/// S^x = ṽ·∇_x.
pub fn s_x() -> DifferentialOperator {
    DifferentialOperator::new("S^x", |_, _, v| match frame_vectors(v) {
        Ok(f) => Coefficients {
            c_t: 0.0,
            c_x: f.v_dir,
            c_v: [0.0; 3],
        },
        Err(_) => Coefficients::default(),
    })
}

/// Ω^v_i = Ṽ_i·∇_v.
pub fn omega_v(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("Omega^v_{}", i + 1), move |_, _, v| {
        match frame_vectors(v) {
            Ok(f) => Coefficients {
                c_t: 0.0,
                c_x: [0.0; 3],
                c_v: f.companions[i],
            },
            Err(_) => Coefficients::default(),
        }
    })
}

/// Ω^x_i = Ṽ_i·∇_x.
pub fn omega_x(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("Omega^x_{}", i + 1), move |_, _, v| {
        match frame_vectors(v) {
            Ok(f) => Coefficients {
                c_t: 0.0,
                c_x: f.companions[i],
                c_v: [0.0; 3],
            },
            Err(_) => Coefficients::default(),
        }
    })
}

/// Ŝ^v = ṽ·K_v, assembled by contracting K_v with ṽ through the Jacobian.
pub fn s_v_hat() -> DifferentialOperator {
    DifferentialOperator::new("SHat^v", |_, x, v| match frame_vectors(v) {
        Ok(f) => {
            let om = omega_good_unknown(x, v);
            let j = hat_v_jacobian(v);
            // (ṽ·∇_v)v̂ contracted: c_x = −γ ω Σ_i ṽ_i J_i
            let mut c_x = [0.0; 3];
            for i in 0..3 {
                for k in 0..3 {
                    c_x[k] += f.v_dir[i] * j[i][k];
                }
            }
            Coefficients {
                c_t: 0.0,
                c_x: scale(c_x, -gamma(v) * om),
                c_v: f.v_dir,
            }
        }
        Err(_) => Coefficients::default(),
    })
}

/// Ω̂^v_i = Ṽ_i·K_v.
pub fn omega_v_hat(i: usize) -> DifferentialOperator {
    DifferentialOperator::new(format!("OmegaHat^v_{}", i + 1), move |_, x, v| {
        match frame_vectors(v) {
            Ok(f) => {
                let om = omega_good_unknown(x, v);
                let j = hat_v_jacobian(v);
                let w = f.companions[i];
                let mut c_x = [0.0; 3];
                for a in 0..3 {
                    for k in 0..3 {
                        c_x[k] += w[a] * j[a][k];
                    }
                }
                Coefficients {
                    c_t: 0.0,
                    c_x: scale(c_x, -gamma(v) * om),
                    c_v: w,
                }
            }
            Err(_) => Coefficients::default(),
        }
    })
}

/// The seventeen localized profile fields, 1-based slot index:
///
/// 1: ψ_{≥1}(|v|) Ŝ^v            2: ψ_{≥1}(|v|) S^x
/// 3–5: ψ_{≥1}(|v|) Ω̂^v_i        6–8: ψ_{≥1}(|v|) Ω^x_i
/// 9–11: ψ_{≤0}(|v|) K_{v_i}     12–14: ψ_{≤0}(|v|) ∂_{x_i}
/// 15–17: Ω̃_i
pub fn profile_field(slot: usize) -> DifferentialOperator {
    let hi = |_t: f64, _x: Vec3, v: Vec3| PSI.ge(1, norm(v));
    let lo = |_t: f64, _x: Vec3, v: Vec3| PSI.le(0, norm(v));
    match slot {
        1 => s_v_hat().localized("G1", hi),
        2 => s_x().localized("G2", hi),
        3..=5 => omega_v_hat(slot - 3).localized(format!("G{slot}"), hi),
        6..=8 => omega_x(slot - 6).localized(format!("G{slot}"), hi),
        9..=11 => k_v(slot - 9).localized(format!("G{slot}"), lo),
        12..=14 => partial_x(slot - 12).localized(format!("G{slot}"), lo),
        15..=17 => rotation_tilde(slot - 15),
        _ => panic!("profile field slot must be 1..=17, got {slot}"),
    }
}

/// Good-derivative count of a slot: 1 for Ŝ^v and Ω^x_i, else 0.
pub fn slot_c_index(slot: usize) -> u32 {
    matches!(slot, 1 | 6..=8) as u32
}

/// Rotational-derivative count of a slot: 1 for Ω^x_i, else 0.
pub fn slot_i_index(slot: usize) -> u32 {
    matches!(slot, 6..=8) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::vector_fields::testfn::{generic_corpus, Gaussian, TestFunction};

    #[test]
    fn linearity_and_constants() {
        // application to a constant is zero; application is linear
        let ops = [scaling(), rotation(0), lorentz_tilde(2), k_v(1), s_v_hat()];
        let constant = TestFunction::Gaussian(Gaussian {
            center_t: 0.0,
            width_t: f64::INFINITY,
            center_x: [0.0; 3],
            width_x: [f64::INFINITY; 3],
            center_v: [0.0; 3],
            width_v: [f64::INFINITY; 3],
            affine: crate::vector_fields::testfn::Affine::ONE,
        });
        let mut rng = Rng::seed_from(6);
        for op in &ops {
            for _ in 0..50 {
                let (t, x, v) = (rng.range(-2.0, 2.0), rng.vec3(-2.0, 2.0), rng.vec3(-2.0, 2.0));
                assert_eq!(op.apply(&constant, t, x, v), 0.0);
            }
        }
        // linearity through jets: op(2f) = 2 op(f)
        let f = &generic_corpus(1)[0];
        let (t, x, v) = (0.3, [1.0, -0.5, 0.2], [0.4, 1.1, -0.3]);
        let jet = f.jet(t, x, v);
        let doubled = crate::vector_fields::testfn::Jet {
            value: 2.0 * jet.value,
            d_t: 2.0 * jet.d_t,
            d_x: scale(jet.d_x, 2.0),
            d_v: scale(jet.d_v, 2.0),
        };
        for op in &ops {
            let a = op.apply_jet(&jet, t, x, v);
            let b = op.apply_jet(&doubled, t, x, v);
            assert!((b - 2.0 * a).abs() <= 1e-14 * a.abs().max(1.0));
        }
    }

    #[test]
    fn scaling_on_t_returns_t() {
        let f = TestFunction::CoordT;
        for t in [0.0, 1.0, -2.5, 7.0] {
            assert_eq!(scaling().apply(&f, t, [1.0, 2.0, 3.0], [0.0; 3]), t);
        }
    }

    #[test]
    fn rotation_annihilates_radial() {
        let f = TestFunction::Gaussian(Gaussian::radial_x(1.3));
        let mut rng = Rng::seed_from(8);
        for _ in 0..200 {
            let x = rng.vec3(-2.0, 2.0);
            for i in 0..3 {
                let r = rotation(i).apply(&f, 0.0, x, [0.0; 3]);
                assert!(r.abs() < 1e-15, "rotation on radial gave {r}");
            }
        }
    }

    #[test]
    fn good_derivative_split_identity() {
        // Ŝ^v f = (ṽ·∇_v) f − (ω/(1+|v|²)) (ṽ·∇_x) f, exactly
        let mut rng = Rng::seed_from(12);
        let corpus = generic_corpus(2);
        for f in &corpus {
            for _ in 0..200 {
                let t = rng.range(-2.0, 2.0);
                let x = rng.vec3(-4.0, 4.0);
                let v = rng.vec3(-3.0, 3.0);
                if norm(v) < 1e-9 {
                    continue;
                }
                let lhs = s_v_hat().apply(f, t, x, v);
                let g2 = 1.0 + dot(v, v);
                let om = omega_good_unknown(x, v);
                let rhs = s_v().apply(f, t, x, v) - om / g2 * s_x().apply(f, t, x, v);
                assert!(
                    (lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()),
                    "split identity residual {}",
                    lhs - rhs
                );
            }
        }
    }

    #[test]
    fn omega_v_hat_split_identity() {
        // Ω̂^v_i f = Ω^v_i f − ω(x,v) Ω^x_i f
        let mut rng = Rng::seed_from(13);
        let corpus = generic_corpus(3);
        for f in &corpus {
            for _ in 0..100 {
                let t = rng.range(-2.0, 2.0);
                let x = rng.vec3(-4.0, 4.0);
                let v = rng.vec3(-3.0, 3.0);
                if norm(v) < 1e-9 {
                    continue;
                }
                let om = omega_good_unknown(x, v);
                for i in 0..3 {
                    let lhs = omega_v_hat(i).apply(f, t, x, v);
                    let rhs = omega_v(i).apply(f, t, x, v) - om * omega_x(i).apply(f, t, x, v);
                    assert!((lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()));
                }
            }
        }
    }

    #[test]
    fn profile_fields_vanish_in_dead_zones() {
        // high-|v| slots off near v=0; low-|v| slots off at large |v|
        let f = &generic_corpus(4)[0];
        for slot in 1..=8 {
            let r = profile_field(slot).apply(f, 0.5, [1.0, 2.0, 0.5], [0.1, 0.0, 0.0]);
            assert_eq!(r, 0.0, "slot {slot} leaked at small v");
        }
        for slot in 9..=14 {
            let r = profile_field(slot).apply(f, 0.5, [1.0, 2.0, 0.5], [4.0, 0.0, 0.0]);
            assert_eq!(r, 0.0, "slot {slot} leaked at large v");
        }
    }

    #[test]
    fn fd_application_matches_analytic() {
        let f = &generic_corpus(5)[3];
        let g = |t: f64, x: Vec3, v: Vec3| f.value(t, x, v);
        let ops = [scaling(), lorentz_tilde(0), k_v_tilde(2), rotation_tilde(1)];
        let mut rng = Rng::seed_from(14);
        for op in &ops {
            for _ in 0..50 {
                let t = rng.range(-1.5, 1.5);
                let x = rng.vec3(-1.5, 1.5);
                let v = rng.vec3(-1.5, 1.5);
                let a = op.apply(f, t, x, v);
                let b = op.apply_fd(&g, t, x, v, 1e-2);
                assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()), "{}: {a} vs {b}", op.name);
            }
        }
    }
}
