//! Run the full verification suite: every algebraically exact identity
//! (cone factorization, both decompositions of the bulk derivative D_v,
//! derivative trading, force divergence, frame reconstruction), the
//! commutation studies against free transport, the null-phase calibration,
//! and the sampled modulation/weight bounds.
//!
//!     cargo run --release --example identity_suite

use rvm_lab::harness::suite::{run_identity_suite, SuiteOptions};

fn main() {
    let opts = SuiteOptions {
        negative_controls: true,
        ..Default::default()
    };
    let t0 = std::time::Instant::now();
    let report = run_identity_suite(&opts);
    print!("{}", report.render());
    println!(
        "{} checks in {:.2?}: {}",
        report.checks.len(),
        t0.elapsed(),
        if report.all_pass() { "ALL PASS" } else { "FAILURES" }
    );
    if !report.all_pass() {
        std::process::exit(1);
    }
}
