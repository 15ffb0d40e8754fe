//! Particle discretization of the Vlasov equation: relativistic pushers,
//! charge-conserving deposition, field gathering, and the exact free-transport
//! oracle.

pub mod deposit;
pub mod ensemble;
pub mod oracle;

pub use deposit::{charge_conserving_sources, deposit, deposit_charge, SourceDensity};
pub use ensemble::{boris_push, wrap, GaussianPhaseSpace, ParticleEnsemble};
pub use oracle::{free_transport_density, free_transport_density_with, gauss_legendre, Moment};
