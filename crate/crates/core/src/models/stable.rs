//! Symmetric α-stable decoherence, Ψ(s) = −K|s/x0|^α.

use std::f64::consts::PI;

use serde::Serialize;
use libm::tgamma as gamma;

use crate::error::{Error, Result};
use crate::levy::{CharacteristicExponent, JumpWeight, LevyTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StableParams {
    pub alpha: f64,
    /// Rate, units 1/time.
    pub k: f64,
    /// Correlation length.
    pub x0: f64,
}

impl StableParams {
    pub fn new(alpha: f64, k: f64, x0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!("K must be positive, got {k}")));
        }
        if !(x0 > 0.0) || !x0.is_finite() {
            return Err(Error::InvalidParameter(format!("x0 must be positive, got {x0}")));
        }
        Ok(Self { alpha, k, x0 })
    }

    pub fn is_gaussian(&self) -> bool {
        self.alpha == 2.0
    }
}

/// Weight `c_α` for which the measure `c_α/|q|^{α+1}` yields Ψ(s) = −|s|^α at ħ = 1.
///
/// Follows from ∫₀^∞ (1 − cos u) u^{−α−1} du = π / (2Γ(1+α) sin(πα/2)).
pub fn c_alpha(alpha: f64) -> f64 {
    gamma(1.0 + alpha) * (0.5 * PI * alpha).sin() / PI
}

/// Closed-form exponent; α = 2 becomes a pure diffusion with D = 2K/x0².
pub fn stable_exponent(p: &StableParams) -> Result<CharacteristicExponent> {
    let p = StableParams::new(p.alpha, p.k, p.x0)?;
    let e = if p.is_gaussian() {
        CharacteristicExponent::gaussian(0.0, 2.0 * p.k / (p.x0 * p.x0))
    } else {
        CharacteristicExponent::stable(p.k, p.alpha, p.x0)
    };
    Ok(e.with_label("stable"))
}

/// The same process written as a triplet: the power-law measure
/// `c_α K (ħ/x0)^α / |q|^{α+1}` with compensator scale ħ/x0, or the
/// diffusion term for α = 2.
pub fn stable_triplet(p: &StableParams, hbar: f64) -> Result<LevyTriplet> {
    let p = StableParams::new(p.alpha, p.k, p.x0)?;
    if p.is_gaussian() {
        return Ok(LevyTriplet::gaussian(0.0, 2.0 * p.k / (p.x0 * p.x0)).with_hbar(hbar));
    }
    let scale = c_alpha(p.alpha) * p.k * (hbar / p.x0).powf(p.alpha);
    Ok(LevyTriplet::default()
        .with_omega(JumpWeight::PowerLaw { scale, alpha: p.alpha }, hbar / p.x0)
        .with_hbar(hbar))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_range() {
        assert!(matches!(StableParams::new(0.0, 1.0, 1.0), Err(Error::AlphaOutOfRange(_))));
        assert!(matches!(StableParams::new(2.1, 1.0, 1.0), Err(Error::AlphaOutOfRange(_))));
        assert!(StableParams::new(2.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn cauchy_weight() {
        assert!((c_alpha(1.0) - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn alpha_one_unit_time() {
        let psi = stable_exponent(&StableParams::new(1.0, 1.0, 2.0).unwrap()).unwrap();
        assert!((psi.eval(2.0).unwrap().exp().norm() - (-1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn alpha_two_is_diffusion() {
        let p = StableParams::new(2.0, 0.5, 2.0).unwrap();
        let psi = stable_exponent(&p).unwrap();
        assert!(psi.active_terms().diffusion);
        let gauss = CharacteristicExponent::gaussian(0.0, 0.25);
        for &s in &[0.3, 1.0, 7.0] {
            assert_eq!(psi.eval(s).unwrap(), gauss.eval(s).unwrap());
        }
    }
}
