//! Pseudo-spectral Maxwell solver on a periodic box in half-wave form, with
//! profile extraction, constraint monitoring, and frequency-space norms.

pub mod profile;
pub mod state;

pub use profile::{
    extract_profiles, low_mode_bins, modified_profile_correction, reconstruct_fields, xn_norm,
    HalfWaveProfile,
};
pub use state::{trilinear, FieldState, Grid, RealFields, SourceSpectra};
