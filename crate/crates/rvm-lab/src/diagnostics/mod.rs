//! Turns runs into verdicts: exponent fits, cone sampling, energy
//! surrogates, and conservation monitors. Pure post-processing over
//! immutable snapshots.

pub mod observe;
pub mod series;

pub use observe::{
    density_moment, energy_surrogates, total_energy, ConeSampler, ConservationReport,
    EnergySurrogates, Offset,
};
pub use series::{fit_decay_exponent, fit_with_shrunk_window, DecaySeries, FitResult};
