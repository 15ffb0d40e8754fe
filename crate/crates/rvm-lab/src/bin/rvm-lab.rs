//! Command-line front end: `identities`, `run`, `fit`, `dump-info`.
//!
//! Exit codes: 0 all checks pass, 1 assertion failure, 2 configuration error.

use rvm_lab::diagnostics::series::{fit_decay_exponent, DecaySeries};
use rvm_lab::harness::{
    self, run_free_transport, run_free_wave, run_rvm, suite, RunConfig, Scenario,
};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let code = match args.first().map(String::as_str) {
        Some("identities") => cmd_identities(&args[1..]),
        Some("run") => cmd_run(&args[1..]),
        Some("fit") => cmd_fit(&args[1..]),
        Some("dump-info") => cmd_dump_info(&args[1..]),
        Some("--help") | Some("-h") | None => {
            print_usage();
            0
        }
        Some(other) => {
            eprintln!("unknown subcommand '{other}'");
            print_usage();
            2
        }
    };
    ExitCode::from(code)
}

fn print_usage() {
    println!(
        "rvm-lab: a numerical laboratory for the 3D relativistic Vlasov-Maxwell system

USAGE:
  rvm-lab identities [--config FILE] [--KEY=VALUE ...] [--negative-controls]
      run the exact-identity / commutation / calibration suite
  rvm-lab run --scenario NAME [--config FILE] [--KEY=VALUE ...]
      run a scenario (free-wave | free-transport | rvm) and write a run
      directory with config.txt, series.csv, report.txt
  rvm-lab fit PATH --observable NAME [--window A:B]
      power-law fit of an observable from a run directory or series.csv
  rvm-lab dump-info [FILE ...]
      describe .rvmf/.rvmp dumps; with no file, print version and presets

Config keys (also valid as --KEY=VALUE flags) are listed in any written
config.txt; unknown keys are hard errors. The env var {} names the output
root (default ./runs).",
        harness::OUTPUT_ROOT_ENV
    );
}

/// Apply `--config FILE` and `--key=value` overrides onto a config.
fn apply_flags(cfg: &mut RunConfig, args: &[String]) -> Result<(), String> {
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            let path = args
                .get(i + 1)
                .ok_or_else(|| "--config needs a file".to_string())?;
            let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            *cfg = RunConfig::parse(&text).map_err(|e| e.to_string())?;
            i += 2;
            continue;
        }
        if a == "--negative-controls" {
            cfg.negative_controls = true;
            i += 1;
            continue;
        }
        if let Some(rest) = a.strip_prefix("--") {
            if let Some((key, value)) = rest.split_once('=') {
                cfg.set_key(key, value).map_err(|e| e.to_string())?;
                i += 1;
                continue;
            }
            if rest == "scenario" {
                let v = args
                    .get(i + 1)
                    .ok_or_else(|| "--scenario needs a value".to_string())?;
                cfg.set_key("scenario", v).map_err(|e| e.to_string())?;
                i += 2;
                continue;
            }
        }
        return Err(format!("unexpected argument '{a}'"));
    }
    Ok(())
}

fn cmd_identities(args: &[String]) -> u8 {
    let mut cfg = RunConfig::preset(Scenario::Identities);
    if let Err(e) = apply_flags(&mut cfg, args) {
        eprintln!("config error: {e}");
        return 2;
    }
    let opts = suite::SuiteOptions {
        seed: cfg.seed,
        fd_step: cfg.fd_step,
        negative_controls: cfg.negative_controls,
        samples: 100_000,
    };
    let report = suite::run_identity_suite(&opts);
    print!("{}", report.render());
    if report.all_pass() {
        println!("identity suite: ALL PASS");
        0
    } else {
        println!("identity suite: FAILURES PRESENT");
        1
    }
}

fn cmd_run(args: &[String]) -> u8 {
    // the scenario decides the preset, so find it first
    let mut scenario = None;
    for (i, a) in args.iter().enumerate() {
        if let Some(v) = a.strip_prefix("--scenario=") {
            scenario = Some(v.to_string());
        } else if a == "--scenario" {
            scenario = args.get(i + 1).cloned();
        }
    }
    let scenario = match scenario.as_deref().map(Scenario::parse) {
        Some(Ok(s)) => s,
        Some(Err(e)) => {
            eprintln!("config error: {e}");
            return 2;
        }
        None => {
            eprintln!("config error: run needs --scenario NAME");
            return 2;
        }
    };
    let mut cfg = RunConfig::preset(scenario);
    let args_sans: Vec<String> = {
        let mut out = Vec::new();
        let mut skip = false;
        for a in args.iter() {
            if skip {
                skip = false;
                continue;
            }
            if a.starts_with("--scenario=") {
                continue;
            }
            if a == "--scenario" {
                skip = true;
                continue;
            }
            out.push(a.clone());
        }
        out
    };
    if let Err(e) = apply_flags(&mut cfg, &args_sans) {
        eprintln!("config error: {e}");
        return 2;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("refusing to start: {e}");
        return 2;
    }
    let result = match scenario {
        Scenario::FreeWave => run_free_wave(&cfg),
        Scenario::FreeTransport => run_free_transport(&cfg),
        Scenario::Rvm => run_rvm(&cfg),
        Scenario::Identities => {
            // `run --scenario identities` behaves like the subcommand
            return cmd_identities(&args_sans);
        }
    };
    match result {
        Ok(out) => {
            print!("{}", out.report_text());
            match harness::write_run_output(&cfg, &out) {
                Ok(dir) => println!("run directory: {}", dir.display()),
                Err(e) => {
                    eprintln!("failed to write run directory: {e}");
                    return 1;
                }
            }
            if out.checks.iter().all(|c| c.pass) {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("run failed: {e}");
            1
        }
    }
}

fn cmd_fit(args: &[String]) -> u8 {
    let mut path: Option<PathBuf> = None;
    let mut observable: Option<String> = None;
    let mut window: Option<(f64, f64)> = None;
    let mut i = 0;
    while i < args.len() {
        match args[i].as_str() {
            "--observable" => {
                observable = args.get(i + 1).cloned();
                i += 2;
            }
            "--window" => {
                let spec = match args.get(i + 1) {
                    Some(s) => s,
                    None => {
                        eprintln!("--window needs A:B");
                        return 2;
                    }
                };
                let parts: Vec<&str> = spec.split(':').collect();
                let parsed = (|| -> Option<(f64, f64)> {
                    if parts.len() != 2 {
                        return None;
                    }
                    Some((parts[0].parse().ok()?, parts[1].parse().ok()?))
                })();
                match parsed {
                    Some(w) => window = Some(w),
                    None => {
                        eprintln!("cannot parse window '{spec}' (expected A:B)");
                        return 2;
                    }
                }
                i += 2;
            }
            other if !other.starts_with("--") => {
                path = Some(PathBuf::from(other));
                i += 1;
            }
            other => {
                eprintln!("unexpected argument '{other}'");
                return 2;
            }
        }
    }
    let Some(path) = path else {
        eprintln!("fit needs a run directory or series.csv path");
        return 2;
    };
    let csv = if path.is_dir() {
        path.join("series.csv")
    } else {
        path
    };
    let all = match harness::read_series_csv(&csv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("cannot read {}: {e}", csv.display());
            return 2;
        }
    };
    let Some(name) = observable else {
        eprintln!(
            "fit needs --observable NAME; available: {}",
            all.keys().cloned().collect::<Vec<_>>().join(", ")
        );
        return 2;
    };
    let Some(points) = all.get(&name) else {
        eprintln!(
            "observable '{name}' not found; available: {}",
            all.keys().cloned().collect::<Vec<_>>().join(", ")
        );
        return 2;
    };
    let (lo, hi) = window.unwrap_or_else(|| {
        (
            points.first().map(|&(t, _)| t).unwrap_or(0.0),
            points.last().map(|&(t, _)| t).unwrap_or(0.0),
        )
    });
    let mut series = DecaySeries::new((lo, hi));
    for &(t, v) in points {
        series.push(t, v);
    }
    match fit_decay_exponent(&series) {
        Ok(fit) => {
            println!(
                "{name}: exponent = {:.4} +- {:.4} ({} samples in [{lo}, {hi}])",
                fit.exponent, fit.stderr, fit.samples
            );
            0
        }
        Err(e) => {
            eprintln!("fit rejected: {e}");
            1
        }
    }
}

fn cmd_dump_info(args: &[String]) -> u8 {
    if args.is_empty() {
        println!(
            "rvm-lab {} — binary formats: RVMF v{} (fields), RVMP v{} (ensemble)",
            env!("CARGO_PKG_VERSION"),
            rvm_lab::io::FORMAT_VERSION,
            rvm_lab::io::FORMAT_VERSION,
        );
        println!("scenario presets:");
        for s in [Scenario::FreeWave, Scenario::FreeTransport, Scenario::Rvm] {
            let cfg = RunConfig::preset(s);
            println!(
                "  {:<15} n={} L={} dt={} particles={} epsilon={} t_end={}",
                s.name(),
                cfg.grid_n,
                cfg.box_length,
                cfg.dt(),
                cfg.particles,
                cfg.epsilon,
                cfg.t_end
            );
        }
        return 0;
    }
    let mut bad = false;
    for a in args {
        match rvm_lab::io::describe_dump(Path::new(a)) {
            Ok(info) => println!("{a}: {info}"),
            Err(e) => {
                eprintln!("{a}: {e}");
                bad = true;
            }
        }
    }
    u8::from(bad)
}
