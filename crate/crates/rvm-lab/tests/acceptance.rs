//! Acceptance suite: one test per headline criterion, each printing its own
//! pass/fail line with the measured values and runtime. The criteria pin the
//! tolerances in code; nothing is deferred to later calibration.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture` to see
//! the per-criterion lines (the default profile also passes, just slower).

use num_complex::Complex64;
use rvm_lab::harness::suite::{run_identity_suite, SuiteOptions};
use rvm_lab::harness::{
    profile_correction_comparison, run_free_transport, run_free_wave, run_rvm, RunConfig,
    Scenario,
};
use rvm_lab::maxwell::state::SourceSpectra;
use rvm_lab::maxwell::{extract_profiles, reconstruct_fields, FieldState, Grid};
use rvm_lab::rng::Rng;
use rvm_lab::{norm, scale};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// The heavyweight criteria run one at a time so the stated runtime budgets
/// mean what they say.
static SERIAL: Mutex<()> = Mutex::new(());

fn line(criterion: &str, pass: bool, detail: &str, elapsed: Duration, budget: Duration) {
    println!(
        "acceptance {criterion}: {} — {detail} (elapsed {:.1?}, budget {:.0?})",
        if pass { "PASS" } else { "FAIL" },
        elapsed,
        budget
    );
    assert!(pass, "{criterion} failed: {detail}");
    assert!(
        elapsed <= budget,
        "{criterion} exceeded its runtime budget: {elapsed:.1?} > {budget:.0?}"
    );
}

#[test]
fn criterion_1_exact_identity_suite() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let opts = SuiteOptions {
        samples: 100_000,
        ..Default::default()
    };
    let mut report = run_identity_suite(&opts);
    report.checks.retain(|c| {
        c.name.starts_with("cone_identity")
            || c.name.starts_with("dv_decomposition")
            || c.name.starts_with("derivative_trading")
            || c.name.starts_with("force_velocity_divergence")
            || c.name.starts_with("frame_reconstruction")
    });
    let worst = report
        .checks
        .iter()
        .map(|c| c.value)
        .fold(0.0f64, f64::max);
    let pass = report.checks.iter().all(|c| c.pass) && report.checks.len() >= 6;
    line(
        "criterion 1 (exact identities < 1e-10 on 1e5 samples)",
        pass,
        &format!("worst residual {worst:.3e} across {} sweeps", report.checks.len()),
        t0.elapsed(),
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_2_commutation_suite() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let opts = SuiteOptions {
        samples: 2_000, // the bound sweeps are not part of this criterion
        negative_controls: true,
        ..Default::default()
    };
    let report = run_identity_suite(&opts);
    let commutation: Vec<_> = report
        .checks
        .iter()
        .filter(|c| c.name.starts_with("commutation"))
        .collect();
    let orders_ok = commutation
        .iter()
        .filter(|c| c.name.starts_with("commutation_order"))
        .all(|c| c.pass);
    let ext_ok = commutation
        .iter()
        .filter(|c| c.name.starts_with("commutation_extrapolated"))
        .all(|c| c.pass && c.value < 1e-6);
    let neg = report
        .checks
        .iter()
        .find(|c| c.name == "negative_control_grad_v")
        .expect("negative control present");
    let pass = orders_ok && ext_ok && neg.pass && neg.value > 1e-2 && !commutation.is_empty();
    line(
        "criterion 2 (commutation order >= 1.9, extrapolated < 1e-6, negative control)",
        pass,
        &format!(
            "{} operator checks, plain grad_v witness residual {:.3e}",
            commutation.len(),
            neg.value
        ),
        t0.elapsed(),
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_3_null_phase_calibration() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let mut rng = Rng::seed_from(2718);
    let mut inf = f64::INFINITY;
    for _ in 0..1_000_000 {
        let s = 10f64.powf(rng.range(-2.0, 2.0));
        let v = scale(rng.vec3(-1.0, 1.0), s);
        let xi = rng.vec3(-1.0, 1.0);
        if norm(xi) < 1e-12 {
            continue;
        }
        inf = inf.min(rvm_lab::geometry::null_phase_ratio(v, xi).unwrap());
    }
    let pass = inf >= rvm_lab::geometry::NULL_PHASE_RATIO_MIN;
    line(
        "criterion 3 (null-phase ratio infimum over 1e6 draws)",
        pass,
        &format!(
            "sampled infimum {inf:.6} vs release calibration {}",
            rvm_lab::geometry::NULL_PHASE_RATIO_MIN
        ),
        t0.elapsed(),
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_4_free_transport_decay() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let cfg = RunConfig::preset(Scenario::FreeTransport);
    assert_eq!(cfg.particles, 1_000_000);
    let out = run_free_transport(&cfg).expect("free-transport run");
    let density = out.fits.get("density_center").expect("density fit");
    let gradient = out.fits.get("density_grad_oracle").expect("gradient fit");
    let z = out
        .checks
        .iter()
        .find(|c| c.name == "density_vs_oracle_zscore")
        .unwrap();
    let gz = out
        .checks
        .iter()
        .find(|c| c.name == "gradient_vs_oracle_zscore")
        .unwrap();
    let pass = (density.exponent + 3.0).abs() <= 0.1
        && (gradient.exponent + 4.0).abs() <= 0.15
        && z.pass
        && gz.pass;
    line(
        "criterion 4 (density -3.0+-0.1, gradient -4.0+-0.15, MC agreement)",
        pass,
        &format!(
            "density {:.4}+-{:.4}, gradient {:.4}+-{:.4}, z-scores {:.2}/{:.2}",
            density.exponent, density.stderr, gradient.exponent, gradient.stderr, z.value, gz.value
        ),
        t0.elapsed(),
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_5_and_6_free_maxwell_decay() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let cfg = RunConfig::preset(Scenario::FreeWave);
    assert_eq!((cfg.grid_n, cfg.box_length), (64, 128.0));
    let out = run_free_wave(&cfg).expect("free-wave run");
    let cone = out.fits.get("field_cone").expect("cone fit");
    let peak = out.fits.get("field_max").expect("peak fit");
    let interior = out
        .checks
        .iter()
        .find(|c| c.name == "interior_after_cone_rel")
        .unwrap();
    let elapsed = t0.elapsed();
    let pass5 = (cone.exponent + 1.0).abs() <= 0.1
        && (peak.exponent + 1.0).abs() <= 0.1
        && interior.pass;
    line(
        "criterion 5 (on-cone -1.0+-0.1, interior < 1e-8 after the cone)",
        pass5,
        &format!(
            "cone {:.4}+-{:.4}, grid max {:.4}+-{:.4}, interior {:.2e} of initial max",
            cone.exponent, cone.stderr, peak.exponent, peak.stderr, interior.value
        ),
        elapsed,
        Duration::from_secs(120),
    );
    let extra = out.fits.get("offcone_ratio").expect("off-cone ratio fit");
    let pass6 = (extra.exponent + 1.0).abs() <= 0.3;
    line(
        "criterion 6 (off-cone extra exponent -1.0+-0.3, same run)",
        pass6,
        &format!("extra exponent {:.4}+-{:.4}", extra.exponent, extra.stderr),
        elapsed,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_7_nonlinear_small_data_run() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    let cfg = RunConfig::preset(Scenario::Rvm);
    assert_eq!(cfg.particles, 1_000_000);
    assert_eq!(cfg.epsilon, 1e-3);
    let out = run_rvm(&cfg).expect("coupled run");
    let take = |name: &str| {
        out.checks
            .iter()
            .find(|c| c.name == name)
            .unwrap_or_else(|| panic!("missing check {name}"))
    };
    let gauss = take("gauss_residual_max");
    let energy = take("energy_drift");
    let cone = take("rvm_cone_exponent");
    let density = take("rvm_density_exponent");
    let low = take("low_order_energy_variation");
    let pass = gauss.pass && energy.pass && cone.pass && density.pass && low.pass;
    line(
        "criterion 7 (coupled run: Gauss < 1e-6, energy < 1e-3, cone -1+-0.2, density -3+-0.2, low-order energy < 20%)",
        pass,
        &format!(
            "gauss {:.2e}, energy drift {:.2e}, cone {:.3}, density {:.3}, low-order growth {:.1}%",
            gauss.value,
            energy.value,
            cone.value,
            density.value,
            100.0 * low.value
        ),
        t0.elapsed(),
        Duration::from_secs(900),
    );
}

#[test]
fn criterion_8_profile_machinery() {
    let _g = SERIAL.lock().unwrap();
    let t0 = Instant::now();
    // half-wave round trip on a random band-limited vacuum state
    let grid = Grid::new(32, 32.0);
    let mut state = random_vacuum_state(grid, 2026);
    state.time = 0.875;
    let src = SourceSpectra::zero(grid);
    let prof = extract_profiles(&state, &src);
    let back = reconstruct_fields(&prof);
    let mut roundtrip = 0.0f64;
    for d in 0..3 {
        for (a, b) in back.e_hat[d].iter().zip(&state.e_hat[d]) {
            roundtrip = roundtrip.max((a - b).norm());
        }
        for (a, b) in back.b_hat[d].iter().zip(&state.b_hat[d]) {
            roundtrip = roundtrip.max((a - b).norm());
        }
    }
    // free-flow constancy
    for _ in 0..48 {
        state.propagate_free(0.25);
    }
    let after = extract_profiles(&state, &src);
    let mut drift = 0.0f64;
    let mut scale0 = 0.0f64;
    for d in 0..3 {
        for (a, b) in after.h1[d].iter().zip(&prof.h1[d]) {
            drift = drift.max((a - b).norm());
            scale0 = scale0.max(b.norm());
        }
    }
    let drift_rel = drift / scale0.max(1e-300);
    // modified-profile correction on the free-transport-coupled linear run
    let (raw, modified) = profile_correction_comparison(20_000, 1).expect("comparison run");
    let reduction = raw / modified.max(1e-300);
    let pass = roundtrip < 1e-10 && drift_rel < 1e-8 && reduction >= 10.0;
    line(
        "criterion 8 (round-trip < 1e-10, frozen profiles < 1e-8, correction >= 10x)",
        pass,
        &format!(
            "round-trip {roundtrip:.2e}, free-flow drift {drift_rel:.2e}, variation reduction {reduction:.0}x"
        ),
        t0.elapsed(),
        Duration::from_secs(120),
    );
}

fn random_vacuum_state(grid: Grid, seed: u64) -> FieldState {
    let mut rng = Rng::seed_from(seed);
    let mut state = FieldState::zero(grid);
    for (flat, (ix, iy, iz)) in grid.bins() {
        if (ix, iy, iz) == (0, 0, 0) {
            continue;
        }
        let xi = grid.xi(ix, iy, iz);
        let k = norm(xi);
        if k > 2.0 {
            continue;
        }
        for d in 0..3 {
            state.e_hat[d][flat] = Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
            state.b_hat[d][flat] = Complex64::new(rng.range(-1.0, 1.0), rng.range(-1.0, 1.0));
        }
        let kd = scale(xi, 1.0 / k);
        for field in [&mut state.e_hat, &mut state.b_hat] {
            let along = field[0][flat] * kd[0] + field[1][flat] * kd[1] + field[2][flat] * kd[2];
            for d in 0..3 {
                field[d][flat] -= along * kd[d];
            }
        }
    }
    let n = grid.n;
    for (flat, (ix, iy, iz)) in grid.bins() {
        let m = rvm_lab::fft::idx(
            n,
            rvm_lab::fft::mirror_bin(n, ix),
            rvm_lab::fft::mirror_bin(n, iy),
            rvm_lab::fft::mirror_bin(n, iz),
        );
        if m < flat {
            continue;
        }
        for d in 0..3 {
            for field in [&mut state.e_hat, &mut state.b_hat] {
                let avg = (field[d][flat] + field[d][m].conj()) * 0.5;
                field[d][flat] = avg;
                field[d][m] = avg.conj();
            }
        }
    }
    state.invalidate_real();
    state
}
