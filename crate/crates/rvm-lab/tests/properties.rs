//! Property tests for the algebraic invariants: whatever the inputs, the
//! exact identities hold to roundoff and the structural guarantees (weight
//! positivity, subluminal velocities, exact magnetic energy conservation)
//! never bend.

use proptest::prelude::*;
use rvm_lab::geometry::weight::{GoodIndices, WeightFunction};
use rvm_lab::geometry::{
    cone_identity_residual, frame_vectors, gamma, hat_v, phi,
};
use rvm_lab::particles::{boris_push, wrap};
use rvm_lab::vector_fields::{
    decompose_dv_residual, trading_identity_residual, DvTable, TestFunction,
};
use rvm_lab::{norm, sub};

fn vec3() -> impl Strategy<Value = [f64; 3]> {
    [-8.0..8.0f64, -8.0..8.0f64, -8.0..8.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn velocity_always_subluminal(v in vec3()) {
        prop_assert!(norm(hat_v(v)) < 1.0);
        prop_assert!(gamma(v) >= 1.0);
    }

    #[test]
    fn frame_reconstructs_every_vector(v in vec3(), u in vec3()) {
        prop_assume!(norm(v) > 1e-9);
        let f = frame_vectors(v).unwrap();
        prop_assert!(norm(sub(f.reconstruct(u), u)) < 1e-12);
    }

    #[test]
    fn cone_identity_holds_everywhere(t in -20.0..20.0f64, x in vec3(), v in vec3()) {
        prop_assert!(cone_identity_residual(t, x, v).abs() < 1e-11);
    }

    #[test]
    fn dv_decompositions_are_exact(
        t in 0.0..5.0f64,
        x in vec3(),
        v in vec3(),
        seed in 0u64..64,
    ) {
        let f = &rvm_lab::vector_fields::generic_corpus(seed)[0];
        prop_assert!(decompose_dv_residual(DvTable::GoodDerivative, f, t, x, v) < 1e-10);
        prop_assert!(decompose_dv_residual(DvTable::Rotation, f, t, x, v) < 1e-10);
    }

    #[test]
    fn trading_identity_exact_for_coordinates(
        t in -10.0..10.0f64,
        x in vec3(),
        i in 0usize..3,
    ) {
        prop_assume!(t.abs() + norm(x) > 1e-6);
        for f in [TestFunction::CoordT, TestFunction::CoordX(i)] {
            let r = trading_identity_residual(i, &f, t, x).unwrap();
            prop_assert!(r.abs() < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn weights_stay_at_least_one_where_defined(
        t in 0.0..50.0f64,
        x in vec3(),
        v in vec3(),
    ) {
        // φ ≥ 1 everywhere, and the hierarchy weight is ≥ 1 at every sampled
        // point (base ≥ 1, (1+|v|)^c ≥ 1, φ^k ≥ 1)
        prop_assert!(phi(t, x, v) >= 1.0);
        let w = WeightFunction::new(1, 1, GoodIndices { c: 1, i: 1 }).unwrap();
        prop_assert!(w.log_value(t, x, v) >= -1e-12);
    }

    #[test]
    fn magnetic_push_preserves_gamma(v in vec3(), b in vec3(), dt in 0.001..0.5f64) {
        let pushed = boris_push(v, [0.0; 3], b, dt);
        prop_assert!((gamma(pushed) - gamma(v)).abs() < 1e-12);
    }

    #[test]
    fn wrap_lands_in_box(x in -1e4..1e4f64, len in 1.0..100.0f64) {
        let w = wrap(x, len);
        prop_assert!((0.0..len).contains(&w));
    }
}
