//! Executable vector-field machinery: the commuting families, the bulk
//! derivative D_v and its two exact decompositions, and finite-difference
//! verification of every commutation relation.

pub mod commutation;
pub mod decomposition;
pub mod operator;
pub mod testfn;

pub use commutation::{
    commutator_convergence_study, transport_commutator_residual, ConvergenceReport,
};
pub use decomposition::{
    apply_dv_to, decompose_dv_residual, div_v_force_residual, dv_coefficient,
    dv_table_weighted_mass_ratio, lambda_rho_d_tilde_ratio, trading_identity_residual, DvTable,
};
pub use operator::{
    k_v, k_v_tilde, lorentz, lorentz_tilde, omega_v, omega_v_hat, omega_x, partial_v, partial_x,
    profile_field, rotation, rotation_tilde, s_v, s_v_hat, s_x, scaling, slot_c_index,
    slot_i_index, transport, Coefficients, DifferentialOperator,
};
pub use testfn::{gaussian_corpus, generic_corpus, transport_corpus, Gaussian, Jet, TestFunction};
