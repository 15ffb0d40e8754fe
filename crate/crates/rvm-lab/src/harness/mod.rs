//! Run orchestration: configuration, scenario drivers, the identity suite,
//! and run-directory output.

pub mod config;
pub mod scenario;
pub mod suite;

pub use config::{RunConfig, Scenario, OUTPUT_ROOT_ENV};
pub use scenario::{
    profile_correction_comparison, run_free_transport, run_free_wave, run_rvm, RunOutput,
};
pub use suite::{run_identity_suite, Check, SuiteOptions, SuiteReport};

use crate::error::Result;
use std::path::{Path, PathBuf};

/// Write a run's artifacts (config echo, long-format CSV, report) into a
/// fresh directory under the configured output root; returns the directory.
pub fn write_run_output(cfg: &RunConfig, out: &RunOutput) -> Result<PathBuf> {
    let dir = cfg
        .output_dir
        .join(format!("{}-seed{}", cfg.scenario.name(), cfg.seed));
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.txt"), cfg.serialize())?;
    std::fs::write(dir.join("series.csv"), out.series_csv())?;
    std::fs::write(dir.join("report.txt"), out.report_text())?;
    if let Some((grid, time, fields)) = &out.final_fields {
        crate::io::write_field_dump(&dir.join("final_state.rvmf"), *grid, *time, fields)?;
    }
    if let Some((time, ensemble)) = &out.final_ensemble {
        crate::io::write_ensemble_checkpoint(&dir.join("final_particles.rvmp"), ensemble, *time)?;
    }
    Ok(dir)
}

/// Read back a series CSV (long format: t,observable,value).
pub fn read_series_csv(
    path: &Path,
) -> Result<std::collections::BTreeMap<String, Vec<(f64, f64)>>> {
    let text = std::fs::read_to_string(path)?;
    let mut out: std::collections::BTreeMap<String, Vec<(f64, f64)>> = Default::default();
    for (i, line) in text.lines().enumerate() {
        if i == 0 && line.starts_with("t,") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, ',');
        let t: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::error::Error::BadFormat(format!("csv line {}", i + 1)))?;
        let name = parts
            .next()
            .ok_or_else(|| crate::error::Error::BadFormat(format!("csv line {}", i + 1)))?;
        let v: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| crate::error::Error::BadFormat(format!("csv line {}", i + 1)))?;
        out.entry(name.to_string()).or_default().push((t, v));
    }
    Ok(out)
}
