//! Scalar geometric kernel: smooth cutoffs, relativistic velocity and frames,
//! light-cone modulations, the good unknown ω(x,v), and energy weights.
//!
//! Everything here is a pure function of its arguments and reentrant.

pub mod cutoff;
pub mod frame;
pub mod modulation;
pub mod weight;

pub use cutoff::{MollifiedStep, SmoothCutoff};
pub use frame::{dir_grad_hat_v, frame_vectors, gamma, hat_v, hat_v_jacobian, Frame};
pub use modulation::{
    cone_gap_weight, cone_identity_residual, cone_quadratic, modulation_d, modulation_d_tilde,
    null_phase, null_phase_ratio, omega_good_unknown, NULL_PHASE_RATIO_MIN,
};
pub use weight::{apply_dv, phi, GoodIndices, WeightFunction, DESK_SCALE_N, MAX_ORDER_TOTAL};
