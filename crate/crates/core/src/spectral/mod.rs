//! Fourier bridge between momentum densities and characteristic functions,
//! plus the quadrature behind the jump integrals.

pub mod fourier;
pub mod jump;
pub mod quadrature;

pub use fourier::{
    cf_to_pd, convolve_power, pd_to_cf, pd_to_cf_at, transform_samples, CfInput, UniformGridPair,
};
pub use jump::jump_integral;
pub use quadrature::{Estimate, QuadratureSpec};
