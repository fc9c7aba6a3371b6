//! Evolution of off-diagonal elements: closed form, jump expansion,
//! superoperator powers, visibilities and the Poisson-to-Gaussian transition.

mod jump;
mod state;
mod transition;
mod visibility;

pub use jump::{
    default_truncation, jump_expansion_evolve, poisson_weights, CountModel, CountWeights, JumpConfig, RateSpec,
};
pub use state::{apply_superoperator, apply_superoperator_via_convolution, evolve_closed_form, OffDiagonalState};
pub use transition::{transition_scan, TransitionReport, TransitionRow, TransitionSummary};
pub use visibility::{visibility, visibility_fn, PathSeparationWeights};
