//! Vacuum Maxwell decay on the periodic box: a compact pulse tracked along
//! the light cone (t⁻¹ peak decay, exact interior silence after the cone
//! passes) and a low-frequency field showing the extra off-cone decay power.
//!
//!     cargo run --release --example free_wave_decay

use rvm_lab::harness::{run_free_wave, RunConfig, Scenario};

fn main() {
    let cfg = RunConfig::preset(Scenario::FreeWave);
    println!(
        "free-wave: n = {}, L = {}, dt = {}, pulse sigma = {}, horizon t = {}",
        cfg.grid_n,
        cfg.box_length,
        cfg.dt(),
        cfg.pulse_sigma,
        cfg.t_end
    );
    let t0 = std::time::Instant::now();
    let out = run_free_wave(&cfg).expect("free-wave run");
    println!("run finished in {:.2?}\n", t0.elapsed());
    print!("{}", out.report_text());
    if let Some(s) = out.series.get("field_interior") {
        println!("\ninterior point |E|+|B| (strong Huygens in action):");
        for (t, v) in s.times.iter().zip(&s.values).step_by(6) {
            println!("  t = {t:>5.1}   {v:.3e}");
        }
    }
    if !out.checks.iter().all(|c| c.pass) {
        std::process::exit(1);
    }
}
