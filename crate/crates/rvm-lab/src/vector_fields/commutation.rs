//! Finite-difference verification of commutation with free transport.
//!
//! For an operator A and the transport operator T = ∂_t + v̂·∇_x, the residual
//! of [T, A] f is evaluated as T(Af) − A(Tf) with 4th-order centered stencils
//! for the outer derivatives and analytic derivatives inside. On free-transport
//! solutions (Tf = 0) the residual reduces to T(Af): "A commutes with the
//! linear operator" is exactly the statement that A maps solutions to
//! solutions, which covers S and L̃_i as well (their commutators are multiples
//! of T itself).
//!
//! The convergence study halves the step twice; for a commuting operator the
//! observed order tracks the stencil order (≥ 2 required, ≈ 4 typical), while
//! the plain ∂_{v_i} negative control stays O(1).

use crate::error::{Error, Result};
use crate::geometry::frame::hat_v;
use crate::vector_fields::operator::{stencil4, DifferentialOperator};
use crate::vector_fields::testfn::TestFunction;
use crate::{dot, Vec3};

/// Residual of [∂_t + v̂·∇_x, op] f at a point, outer derivatives at step h.
pub fn transport_commutator_residual(
    op: &DifferentialOperator,
    f: &TestFunction,
    t: f64,
    x: Vec3,
    v: Vec3,
    h: f64,
) -> f64 {
    // T(A f): FD in t and x of the analytic application of A
    let af = |tt: f64, xx: Vec3, vv: Vec3| op.apply(f, tt, xx, vv);
    let vh = hat_v(v);
    let mut t_of_af = stencil4(|s| af(t + s, x, v), h);
    for i in 0..3 {
        t_of_af += vh[i]
            * stencil4(
                |s| {
                    let mut xs = x;
                    xs[i] += s;
                    af(t, xs, v)
                },
                h,
            );
    }
    // A(T f): T f has an analytic value everywhere, A applied by FD
    let tf = |tt: f64, xx: Vec3, vv: Vec3| {
        let jet = f.jet(tt, xx, vv);
        jet.d_t + dot(hat_v(vv), jet.d_x)
    };
    let a_of_tf = op.apply_fd(&tf, t, x, v, h);
    t_of_af - a_of_tf
}

/// Three-level convergence study of the commutator residual.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceReport {
    /// |residual| at h, h/2, h/4.
    pub residuals: [f64; 3],
    /// log₂ ratios of successive residuals.
    pub orders: [f64; 2],
    /// Residual with the leading 4th-order stencil error removed.
    pub extrapolated: f64,
}

impl ConvergenceReport {
    /// True when the residual either converges at the stencil rate or is
    /// already at the roundoff floor.
    pub fn commutes(&self, floor: f64) -> bool {
        self.residuals[0] < floor || (self.orders[1] > 1.9 && self.extrapolated < 1e-6)
    }
}

/// True when the FD stencil around (t,x,v) stays clear of the thin transition
/// shell of the ω cutoff inside K̃_v (there the coefficient's higher
/// derivatives are enormous and a convergence study at a finite base step is
/// not yet in its asymptotic regime; the commutation itself holds everywhere).
pub fn clear_of_omega_transition(t: f64, x: Vec3, v: Vec3) -> bool {
    let vh = hat_v(v);
    let y = [x[0] - vh[0] * t, x[1] - vh[1] * t, x[2] - vh[2] * t];
    let a = dot(y, v);
    let r_sq = a * a + dot(y, y);
    !(0.02..=4.0).contains(&r_sq)
}

/// Run the study at steps h, h/2, h/4.
///
/// A first refinement that does not reduce the residual means the stencil is
/// roundoff-dominated at this step (h far too small) — reported as a
/// diagnostic error rather than a bogus order, unless everything is already
/// at the noise floor.
pub fn commutator_convergence_study(
    op: &DifferentialOperator,
    f: &TestFunction,
    t: f64,
    x: Vec3,
    v: Vec3,
    h: f64,
) -> Result<ConvergenceReport> {
    let r0 = transport_commutator_residual(op, f, t, x, v, h);
    let r1 = transport_commutator_residual(op, f, t, x, v, h / 2.0);
    let r2 = transport_commutator_residual(op, f, t, x, v, h / 4.0);
    let a = [r0.abs(), r1.abs(), r2.abs()];
    // Roundoff domination shows up as a residual plateau whose VALUE jumps
    // erratically under refinement. A genuinely nonzero commutator also
    // plateaus, but at a stable value (the h⁴ correction is tiny against it),
    // and a healthy study decreases monotonically.
    const FLOOR: f64 = 1e-9;
    let amax = a[0].max(a[1]).max(a[2]);
    let nonmonotone = a[1] > a[0] * 1.0001 || a[2] > a[1] * 1.0001;
    let erratic =
        (r0 - r1).abs() > 0.25 * amax && (r1 - r2).abs() > 0.25 * amax;
    if nonmonotone && erratic && amax > FLOOR {
        return Err(Error::RoundoffDominated {
            step: h,
            detail: format!(
                "residuals {:.3e}, {:.3e}, {:.3e} jump erratically under refinement for {}",
                a[0], a[1], a[2], op.name
            ),
        });
    }
    let orders = [
        (a[0] / a[1].max(f64::MIN_POSITIVE)).log2(),
        (a[1] / a[2].max(f64::MIN_POSITIVE)).log2(),
    ];
    // eliminate the leading h⁴ stencil term between the two finest levels;
    // a genuinely nonzero commutator survives this
    let extrapolated = ((16.0 * r2 - r1) / 15.0).abs();
    Ok(ConvergenceReport {
        residuals: a,
        orders,
        extrapolated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use crate::vector_fields::operator::{
        k_v_tilde, lorentz_tilde, partial_v, partial_x, rotation_tilde, scaling,
    };
    use crate::vector_fields::testfn::transport_corpus;

    fn sample_point(rng: &mut Rng) -> (f64, Vec3, Vec3) {
        loop {
            let p = (rng.range(0.5, 2.5), rng.vec3(-1.5, 1.5), rng.vec3(-1.5, 1.5));
            if clear_of_omega_transition(p.0, p.1, p.2) {
                return p;
            }
        }
    }

    #[test]
    fn partial_x_commutes_exactly() {
        let corpus = transport_corpus(21);
        let mut rng = Rng::seed_from(100);
        for f in corpus.iter().take(4) {
            let (t, x, v) = sample_point(&mut rng);
            let rep = commutator_convergence_study(&partial_x(0), f, t, x, v, 0.08).unwrap();
            assert!(rep.commutes(1e-11), "{rep:?}");
            // direct residual at the small production step
            let r = transport_commutator_residual(&partial_x(0), f, t, x, v, 1e-3);
            assert!(r.abs() < 1e-8, "residual {r}");
        }
    }

    #[test]
    fn pullback_field_commutes_at_stencil_order() {
        let corpus = transport_corpus(22);
        let mut rng = Rng::seed_from(101);
        let mut checked = 0;
        for f in corpus.iter().take(6) {
            let (t, x, v) = sample_point(&mut rng);
            for i in 0..3 {
                let rep =
                    commutator_convergence_study(&k_v_tilde(i), f, t, x, v, 0.08).unwrap();
                assert!(
                    rep.commutes(1e-11),
                    "KTilde_{i} failed: residuals {:?} orders {:?} ext {:.3e}",
                    rep.residuals,
                    rep.orders,
                    rep.extrapolated
                );
                checked += 1;
            }
        }
        assert!(checked > 0);
        // the documented witness point
        let f = &transport_corpus(22)[0];
        let rep = commutator_convergence_study(
            &k_v_tilde(0),
            f,
            2.0,
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            0.08,
        )
        .unwrap();
        assert!(rep.commutes(1e-11));
        assert!(rep.extrapolated < 1e-6);
    }

    #[test]
    fn scaling_lorentz_rotations_commute_on_solutions() {
        let corpus = transport_corpus(23);
        let mut rng = Rng::seed_from(102);
        for f in corpus.iter().take(4) {
            let (t, x, v) = sample_point(&mut rng);
            for op in [scaling(), lorentz_tilde(1), rotation_tilde(2)] {
                let rep = commutator_convergence_study(&op, f, t, x, v, 0.08).unwrap();
                assert!(rep.commutes(1e-11), "{} failed: {rep:?}", op.name);
            }
        }
    }

    #[test]
    fn plain_velocity_gradient_does_not_commute() {
        // the motivating negative control: [T, ∂_{v_1}] = −(∂_{v_1}v̂)·∇_x ≠ 0
        let f = &transport_corpus(24)[0];
        let (t, x, v) = (2.0, [0.4, -0.2, 0.1], [0.5, 0.3, -0.2]);
        let rep = commutator_convergence_study(&partial_v(0), f, t, x, v, 0.08).unwrap();
        assert!(
            rep.extrapolated > 1e-2,
            "negative control extrapolated to {:.3e}",
            rep.extrapolated
        );
        assert!(!rep.commutes(1e-11));
    }

    #[test]
    fn tiny_step_reports_roundoff_domination() {
        let f = &transport_corpus(25)[0];
        let err = commutator_convergence_study(
            &k_v_tilde(0),
            f,
            1.0,
            [0.3, 0.0, 0.1],
            [0.2, 0.4, 0.0],
            1e-12,
        );
        assert!(matches!(err, Err(Error::RoundoffDominated { .. })));
    }
}
