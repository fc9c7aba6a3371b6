//! Concrete processes: gas collisions, the Gaussian limit, α-stable laws and
//! photon scattering.

pub mod gas;
pub mod mandel;
pub mod moments;
pub mod pd;
pub mod stable;
pub mod tabulation;

pub use gas::{isotropic_marginal, normalize_gas_kernel, GasKernel};
pub use mandel::{mandel_cf, mandel_pd, MandelParams};
pub use moments::{compound_poisson_exponent, gaussian_limit, pd_moments};
pub use pd::MomentumPd;
pub use stable::{c_alpha, stable_exponent, stable_triplet, StableParams};
pub use tabulation::Tabulation;
