//! Energy weight functions.
//!
//! The hierarchy weight attached to a derivative order (|α|, |β|) is
//!
//!   ω^α_β(t,x,v) = (1 + |x|² + (x·v)² + |v|²⁰)^{20N − 10(|α|+|β|)}
//!                  · (1+|v|)^{c(β)} · φ(t,x,v)^{|β|−i(β)},
//!
//! with the desk-scale hierarchy constant N = 3 standing in for the full
//! derivative count, c(β) the number of good derivatives (Ŝ^v and Ω^x_i)
//! inside Λ^β and i(β) the number of Ω^x_i alone. The time-dependent factor
//!
//!   φ(t,x,v) = 1 − x·v/(1+|x|) · f((1+|t|)/(|x||v|)) · η(x·ṽ) · ψ_{≥1}(|v|)
//!
//! only activates where x·ṽ ≤ −10, |v| ≳ 1 and |x||v| ≥ 2⁵(1+|t|); there the
//! subtracted term is ≥ 0, so φ ≥ 1 everywhere.
//!
//! Raw values overflow f64 well inside the sampled ranges (the base is raised
//! to the 40th–60th power), so the D_v-ratio diagnostics work with the
//! analytic logarithmic derivative instead; `value` is supplied for moderate
//! arguments.

use crate::error::{Error, Result};
use crate::geometry::cutoff::{MollifiedStep, SmoothCutoff};
use crate::{add, dot, norm, scale, Vec3};

const PSI: SmoothCutoff = SmoothCutoff;
const ETA: MollifiedStep = MollifiedStep;

/// Desk-scale hierarchy constant standing in for the full derivative count.
pub const DESK_SCALE_N: u32 = 3;
/// Largest |α|+|β| the desk-scale hierarchy carries.
pub const MAX_ORDER_TOTAL: u32 = 2;

/// The bump f(s) = e^{−1/(1−2⁵ s)} for 0 ≤ s < 2⁻⁵, zero beyond; f' ≤ 0.
pub fn time_bump(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0; // outside the stated domain ℝ₊; defensively zero
    }
    let w = 1.0 - 32.0 * s;
    if w <= 0.0 {
        0.0
    } else {
        (-1.0 / w).exp()
    }
}

/// d/ds of `time_bump`.
pub fn time_bump_d(s: f64) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let w = 1.0 - 32.0 * s;
    if w <= 0.0 {
        0.0
    } else {
        // d/ds e^{−1/w} = e^{−1/w} · (−1/w²) · dw/ds, dw/ds = −32
        (-1.0 / w).exp() * (-32.0) / (w * w)
    }
}

/// φ(t,x,v). Always ≥ 1; equal to 1 outside the activation region.
pub fn phi(t: f64, x: Vec3, v: Vec3) -> f64 {
    let nv = norm(v);
    let cut_v = PSI.ge(1, nv);
    if cut_v == 0.0 {
        return 1.0;
    }
    let nx = norm(x);
    if nx == 0.0 {
        return 1.0;
    }
    let xv = dot(x, v);
    let x_vdir = xv / nv; // x·ṽ
    let eta = ETA.value(x_vdir);
    if eta == 0.0 {
        return 1.0;
    }
    let f = time_bump((1.0 + t.abs()) / (nx * nv));
    1.0 - xv / (1.0 + nx) * f * eta * cut_v
}

/// (∇_x φ, ∇_v φ), analytic. ∂_t φ is not needed by any consumer.
pub fn phi_gradients(t: f64, x: Vec3, v: Vec3) -> (Vec3, Vec3) {
    let nv = norm(v);
    let cut_v = PSI.ge(1, nv);
    let cut_v_d = PSI.ge_d(1, nv);
    if cut_v == 0.0 && cut_v_d == 0.0 {
        return ([0.0; 3], [0.0; 3]);
    }
    let nx = norm(x);
    if nx == 0.0 {
        return ([0.0; 3], [0.0; 3]);
    }
    let xv = dot(x, v);
    let x_vdir = xv / nv;
    let eta = ETA.value(x_vdir);
    let eta_d = ETA.derivative(x_vdir);
    if eta == 0.0 && eta_d == 0.0 {
        return ([0.0; 3], [0.0; 3]);
    }
    let s = (1.0 + t.abs()) / (nx * nv);
    let f = time_bump(s);
    let f_d = time_bump_d(s);

    // φ = 1 − c(x,v) f(s) η(u) ψ(nv), with c = x·v/(1+|x|), u = x·ṽ
    let c = xv / (1.0 + nx);
    let x_dir = scale(x, 1.0 / nx);
    let v_dir = scale(v, 1.0 / nv);

    // pieces of ∇_x
    let gx_c = add(scale(v, 1.0 / (1.0 + nx)), scale(x_dir, -xv / ((1.0 + nx) * (1.0 + nx))));
    let gx_s = scale(x_dir, -s / nx);
    let gx_u = v_dir; // ∇_x (x·ṽ) = ṽ
    let mut gx = scale(gx_c, -f * eta * cut_v);
    gx = add(gx, scale(gx_s, -c * f_d * eta * cut_v));
    gx = add(gx, scale(gx_u, -c * f * eta_d * cut_v));

    // pieces of ∇_v
    let gv_c = scale(x, 1.0 / (1.0 + nx));
    let gv_s = scale(v_dir, -s / nv);
    // ∇_v (x·v/|v|) = x/|v| − (x·v) v/|v|³
    let gv_u = add(scale(x, 1.0 / nv), scale(v, -xv / (nv * nv * nv)));
    let gv_cutv = v_dir;
    let mut gv = scale(gv_c, -f * eta * cut_v);
    gv = add(gv, scale(gv_s, -c * f_d * eta * cut_v));
    gv = add(gv, scale(gv_u, -c * f * eta_d * cut_v));
    gv = add(gv, scale(gv_cutv, -c * f * eta * cut_v_d));
    (gx, gv)
}

/// Good-derivative indices (c(β), i(β)) carried by a composite derivative.
/// c counts Ŝ^v and Ω^x_i factors, i counts Ω^x_i alone, so i ≤ c ≤ |β|.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodIndices {
    pub c: u32,
    pub i: u32,
}

/// A validated weight of the hierarchy.
#[derive(Clone, Copy, Debug)]
pub struct WeightFunction {
    pub alpha_order: u32,
    pub beta_order: u32,
    pub good: GoodIndices,
}

impl WeightFunction {
    pub fn new(alpha_order: u32, beta_order: u32, good: GoodIndices) -> Result<Self> {
        let total = alpha_order + beta_order;
        if total > MAX_ORDER_TOTAL {
            return Err(Error::InvalidOrder(format!(
                "|α|+|β| = {total} exceeds the desk-scale truncation {MAX_ORDER_TOTAL}"
            )));
        }
        if 10 * total > 20 * DESK_SCALE_N {
            return Err(Error::InvalidOrder(format!(
                "negative polynomial exponent for order {total}"
            )));
        }
        if good.i > good.c || good.c > beta_order {
            return Err(Error::InvalidOrder(format!(
                "good-derivative indices (c={}, i={}) inconsistent with |β| = {beta_order}",
                good.c, good.i
            )));
        }
        Ok(WeightFunction {
            alpha_order,
            beta_order,
            good,
        })
    }

    /// Exponent of the anisotropic base: 20N − 10(|α|+|β|).
    pub fn base_exponent(&self) -> f64 {
        (20 * DESK_SCALE_N) as f64 - 10.0 * (self.alpha_order + self.beta_order) as f64
    }

    /// The weight itself. Positive everywhere; may overflow to ∞ for large
    /// arguments (see module docs) — the ratio diagnostics use
    /// [`WeightFunction::dv_log`] instead.
    pub fn value(&self, t: f64, x: Vec3, v: Vec3) -> f64 {
        let xv = dot(x, v);
        let base = 1.0 + dot(x, x) + xv * xv + norm(v).powi(20);
        base.powf(self.base_exponent())
            * (1.0 + norm(v)).powi(self.good.c as i32)
            * phi(t, x, v).powi((self.beta_order - self.good.i) as i32)
    }

    /// log ω^α_β, safe at any scale.
    pub fn log_value(&self, t: f64, x: Vec3, v: Vec3) -> f64 {
        let xv = dot(x, v);
        let base = 1.0 + dot(x, x) + xv * xv + norm(v).powi(20);
        self.base_exponent() * base.ln()
            + self.good.c as f64 * (1.0 + norm(v)).ln()
            + (self.beta_order - self.good.i) as f64 * phi(t, x, v).ln()
    }

    /// The vector D_v log ω^α_β = D_v ω^α_β / ω^α_β with
    /// D_v = ∇_v − t ∇_v v̂ · ∇_x, evaluated analytically.
    pub fn dv_log(&self, t: f64, x: Vec3, v: Vec3) -> Vec3 {
        let (gx, gv) = self.log_gradients(t, x, v);
        apply_dv(t, v, gx, gv)
    }

    /// (∇_x log ω, ∇_v log ω), analytic.
    pub fn log_gradients(&self, t: f64, x: Vec3, v: Vec3) -> (Vec3, Vec3) {
        let xv = dot(x, v);
        let nv = norm(v);
        let base = 1.0 + dot(x, x) + xv * xv + nv.powi(20);
        let e = self.base_exponent();
        // ∇_x base = 2x + 2(x·v) v ; ∇_v base = 2(x·v) x + 20|v|^{18} v
        let gx_base = add(scale(x, 2.0), scale(v, 2.0 * xv));
        let mut gv_base = scale(x, 2.0 * xv);
        if nv > 0.0 {
            gv_base = add(gv_base, scale(v, 20.0 * nv.powi(18)));
        }
        let mut gx = scale(gx_base, e / base);
        let mut gv = scale(gv_base, e / base);
        if self.good.c > 0 && nv > 0.0 {
            gv = add(gv, scale(v, self.good.c as f64 / (nv * (1.0 + nv))));
        }
        let phi_pow = (self.beta_order - self.good.i) as f64;
        if phi_pow > 0.0 {
            let p = phi(t, x, v);
            let (px, pv) = phi_gradients(t, x, v);
            gx = add(gx, scale(px, phi_pow / p));
            gv = add(gv, scale(pv, phi_pow / p));
        }
        (gx, gv)
    }
}

/// D_v g = ∇_v g − t (∇_v v̂) ∇_x g for a scalar with known gradients.
pub fn apply_dv(t: f64, v: Vec3, grad_x: Vec3, grad_v: Vec3) -> Vec3 {
    let j = crate::geometry::frame::hat_v_jacobian(v);
    let mut out = grad_v;
    for i in 0..3 {
        let mut jdotgx = 0.0;
        for k in 0..3 {
            jdotgx += j[i][k] * grad_x[k];
        }
        out[i] -= t * jdotgx;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::modulation::{cone_gap_weight, modulation_d_tilde};
    use crate::rng::Rng;

    #[test]
    fn phi_is_one_off_support_and_above_one_on_it() {
        // inactive: positive x·v
        assert_eq!(phi(1.0, [5.0, 0.0, 0.0], [3.0, 0.0, 0.0]), 1.0);
        // inactive: small |v|
        assert_eq!(phi(1.0, [-30.0, 0.0, 0.0], [0.5, 0.0, 0.0]), 1.0);
        // active: x·ṽ = −30 ≤ −20, (1+t)/(|x||v|) = 2/120 < 2⁻⁵
        let p = phi(1.0, [-30.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        assert!(p > 1.0, "φ = {p} not strictly above 1");
    }

    #[test]
    fn phi_never_below_one() {
        let mut rng = Rng::seed_from(88);
        for _ in 0..100_000 {
            let t = rng.range(0.0, 30.0);
            let x = rng.vec3(-60.0, 60.0);
            let v = rng.vec3(-6.0, 6.0);
            let p = phi(t, x, v);
            assert!(p >= 1.0, "φ = {p} at t={t} x={x:?} v={v:?}");
        }
    }

    #[test]
    fn phi_gradients_match_finite_differences() {
        let mut rng = Rng::seed_from(17);
        let h = 1e-5;
        let mut active = 0;
        for _ in 0..40_000 {
            let t = rng.range(0.0, 4.0);
            let x = rng.vec3(-40.0, 40.0);
            let v = rng.vec3(-6.0, 6.0);
            if phi(t, x, v) > 1.0 {
                active += 1;
            }
            let (gx, gv) = phi_gradients(t, x, v);
            for i in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd = (phi(t, xp, v) - phi(t, xm, v)) / (2.0 * h);
                assert!((fd - gx[i]).abs() < 2e-6);
                let mut vp = v;
                let mut vm = v;
                vp[i] += h;
                vm[i] -= h;
                let fd = (phi(t, x, vp) - phi(t, x, vm)) / (2.0 * h);
                assert!((fd - gv[i]).abs() < 2e-6);
            }
        }
        assert!(active > 50, "sampling never hit the φ active region");
    }

    #[test]
    fn weight_examples() {
        let w = WeightFunction::new(0, 0, GoodIndices { c: 0, i: 0 }).unwrap();
        // x = v = 0: base 1, no φ factor
        assert_eq!(w.value(3.0, [0.0; 3], [0.0; 3]), 1.0);
        // |β| = i(β): weight independent of φ (compared in log space, the
        // raw value overflows f64 at |v| = 4 with the order-1 exponent)
        let w = WeightFunction::new(0, 1, GoodIndices { c: 1, i: 1 }).unwrap();
        let a = w.log_value(1.0, [-30.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        let b = w.log_value(500.0, [-30.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        assert!((a - b).abs() < 1e-12 * a.abs(), "φ leaked into an i(β)=|β| weight");
        // and does depend on φ when i(β) < |β|
        let w = WeightFunction::new(0, 1, GoodIndices { c: 0, i: 0 }).unwrap();
        let a = w.log_value(1.0, [-30.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        let b = w.log_value(500.0, [-30.0, 0.0, 0.0], [4.0, 0.0, 0.0]);
        assert!((a - b).abs() > 1e-6, "φ missing from a |β|−i(β)=1 weight");
        // positivity on moderate samples
        let mut rng = Rng::seed_from(3);
        let w = WeightFunction::new(1, 1, GoodIndices { c: 1, i: 0 }).unwrap();
        for _ in 0..1000 {
            let t = rng.range(0.0, 10.0);
            let x = rng.vec3(-2.0, 2.0);
            let v = rng.vec3(-1.5, 1.5);
            assert!(w.value(t, x, v) > 0.0);
        }
    }

    #[test]
    fn order_validation() {
        assert!(WeightFunction::new(2, 1, GoodIndices { c: 0, i: 0 }).is_err());
        assert!(WeightFunction::new(0, 1, GoodIndices { c: 0, i: 1 }).is_err());
        assert!(WeightFunction::new(0, 0, GoodIndices { c: 1, i: 0 }).is_err());
    }

    #[test]
    fn log_gradients_match_finite_differences() {
        let w = WeightFunction::new(0, 2, GoodIndices { c: 1, i: 0 }).unwrap();
        let mut rng = Rng::seed_from(55);
        let h = 1e-5;
        for _ in 0..2000 {
            let t = rng.range(0.0, 5.0);
            let x = rng.vec3(-8.0, 8.0);
            let v = rng.vec3(-2.0, 2.0);
            let (gx, gv) = w.log_gradients(t, x, v);
            for i in 0..3 {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                let fd = (w.log_value(t, xp, v) - w.log_value(t, xm, v)) / (2.0 * h);
                assert!((fd - gx[i]).abs() < 2e-5 * (1.0 + fd.abs()));
                let mut vp = v;
                let mut vm = v;
                vp[i] += h;
                vm[i] -= h;
                let fd = (w.log_value(t, x, vp) - w.log_value(t, x, vm)) / (2.0 * h);
                assert!((fd - gv[i]).abs() < 2e-5 * (1.0 + fd.abs()));
            }
        }
    }

    #[test]
    fn weight_ratio_bound_sampled() {
        // |D_v ω^α_β / ω^α_β| / (1 + ||t|−|x+v̂t||) and |d̃ φ| / (1 + ‖·‖)
        // stay below calibration constants, stably across seeds
        let w = WeightFunction::new(0, 2, GoodIndices { c: 1, i: 0 }).unwrap();
        let mut sups = [0.0f64; 2];
        let mut sups_b = [0.0f64; 2];
        for (seed, out) in [(101u64, &mut sups), (202u64, &mut sups_b)] {
            let mut rng = Rng::seed_from(seed);
            for _ in 0..150_000 {
                let t = rng.range(0.0, 40.0);
                let x = rng.vec3(-40.0, 40.0);
                let v = rng.vec3(-4.0, 4.0);
                let gap = cone_gap_weight(t, x, v);
                let ratio = crate::norm(w.dv_log(t, x, v)) / gap;
                out[0] = out[0].max(ratio);
                let dphi = (modulation_d_tilde(t, x, v) * phi(t, x, v)).abs() / gap;
                out[1] = out[1].max(dphi);
            }
        }
        // calibration from the first-release run: sampled sups ≈ 517 and
        // ≈ 1.96 on this box (the first is large because D_v log of the
        // |v|²⁰-power base scales with the desk-scale exponent; what matters
        // is stability and non-regression)
        assert!(sups[0] < 800.0, "D_v log ω ratio regressed: {}", sups[0]);
        assert!(sups[1] < 3.0, "d̃·φ ratio regressed: {}", sups[1]);
        for k in 0..2 {
            let (a, b) = (sups[k], sups_b[k]);
            assert!((a - b).abs() < 0.35 * a.max(b), "unstable sup {k}: {a} vs {b}");
        }
    }
}
