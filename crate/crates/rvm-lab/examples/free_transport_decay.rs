//! Free-streaming particles: the density at a fixed point decays like t⁻³
//! and its gradient (on a comoving ray) like t⁻⁴, checked against the
//! certified quadrature oracle with Monte-Carlo error bars.
//!
//!     cargo run --release --example free_transport_decay [particle_count]

use rvm_lab::harness::{run_free_transport, RunConfig, Scenario};

fn main() {
    let mut cfg = RunConfig::preset(Scenario::FreeTransport);
    if let Some(n) = std::env::args().nth(1) {
        cfg.particles = n.parse().expect("particle count");
    } else {
        cfg.particles = 250_000; // the acceptance suite runs the full 10⁶
    }
    println!(
        "free-transport: {} particles, sigma_x = {}, sigma_v = {}, t up to {}",
        cfg.particles, cfg.sigma_x, cfg.sigma_v, cfg.t_end
    );
    let t0 = std::time::Instant::now();
    let out = run_free_transport(&cfg).expect("free-transport run");
    println!("run finished in {:.2?}\n", t0.elapsed());
    print!("{}", out.report_text());
    if let (Some(grid), Some(oracle)) = (
        out.series.get("density_center"),
        out.series.get("density_oracle"),
    ) {
        println!("\ndeposited vs oracle density at the cloud center:");
        for ((t, g), (_, o)) in grid
            .times
            .iter()
            .zip(&grid.values)
            .zip(oracle.times.iter().zip(&oracle.values))
            .step_by(8)
        {
            println!("  t = {t:>5.1}   grid {g:.4e}   oracle {o:.4e}");
        }
    }
    if !out.checks.iter().all(|c| c.pass) {
        std::process::exit(1);
    }
}
