//! Collisional decoherence by a background gas.

use std::f64::consts::PI;

use serde::Serialize;

use super::pd::MomentumPd;
use super::tabulation::Tabulation;
use crate::error::{Error, Result};
use crate::spectral::quadrature::integrate_real;

/// Collision kernel w(q) ≥ 0 together with the gas and particle scalars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GasKernel {
    pub kernel: Tabulation,
    /// Gas number density n.
    pub density: f64,
    /// Test-particle mass M.
    pub mass: f64,
    /// Incoming momentum p0.
    pub p0: f64,
}

impl GasKernel {
    pub fn new(kernel: Tabulation, density: f64, mass: f64, p0: f64) -> Result<Self> {
        for (name, v) in [("density", density), ("mass", mass), ("p0", p0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { kernel, density, mass, p0 })
    }

    /// σ = (M/p0)∫w dq.
    pub fn cross_section(&self) -> f64 {
        self.mass / self.p0 * self.kernel.integral()
    }
}

/// Splits the kernel into a total rate Λ = n(p0/M)σ = n∫w and a normalized
/// density w/∫w. The incoming momentum cancels from Λ.
pub fn normalize_gas_kernel(g: &GasKernel) -> Result<(f64, MomentumPd)> {
    let total = g.kernel.integral();
    if !total.is_finite() {
        return Err(Error::NonIntegrableKernel(format!("kernel integral {total}")));
    }
    if !(total > 0.0) {
        return Err(Error::ZeroKernel);
    }
    let rate = g.density * g.p0 / g.mass * g.cross_section();
    Ok((rate, MomentumPd::tabulated(g.kernel.clone())?))
}

/// Marginal along one axis of an isotropic 3D density `g(|q|)`:
/// P(z) = 2π∫_{|z|}^{r_max} g(r) r dr.
pub fn isotropic_marginal(radial: impl Fn(f64) -> f64, nodes: Vec<f64>, r_max: f64) -> Result<Tabulation> {
    let values = nodes
        .iter()
        .map(|&z| {
            let a = z.abs();
            if a >= r_max {
                Ok(0.0)
            } else {
                integrate_real(|r| radial(r) * r, a, r_max, 1e-300, 1e-12).map(|v| 2.0 * PI * v)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Tabulation::new(nodes, values)
}
