//! The coupled small-data run: a Gaussian phase-space cloud against the
//! pseudo-spectral Maxwell solver with charge-conserving sources. Monitors
//! Gauss's law to roundoff, total-energy drift, the radiated field's on-cone
//! decay, the density decay, and the (corrected) low-order profile energy.
//!
//!     cargo run --release --example nonlinear_small_data [particle_count]

use rvm_lab::harness::{run_rvm, RunConfig, Scenario};

fn main() {
    let mut cfg = RunConfig::preset(Scenario::Rvm);
    if let Some(n) = std::env::args().nth(1) {
        cfg.particles = n.parse().expect("particle count");
    } else {
        cfg.particles = 200_000; // the acceptance suite runs the full 10⁶
    }
    println!(
        "coupled run: {} particles, epsilon = {}, n = {}, T = {}",
        cfg.particles, cfg.epsilon, cfg.grid_n, cfg.t_end
    );
    if cfg.particles < 100_000 {
        println!(
            "note: the statistical checks (density exponent, low-order energy trend) are \
             calibrated for >= 1e5 particles and get noisy below that"
        );
    }
    let t0 = std::time::Instant::now();
    let out = run_rvm(&cfg).expect("coupled run");
    println!("run finished in {:.2?}\n", t0.elapsed());
    print!("{}", out.report_text());
    if !out.checks.iter().all(|c| c.pass) {
        std::process::exit(1);
    }
}
