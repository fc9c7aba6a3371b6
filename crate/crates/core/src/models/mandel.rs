//! Momentum transfer along the laser axis from one absorption plus one
//! spontaneous emission, defined through its characteristic function.

use num_complex::Complex64;
use serde::Serialize;

use super::pd::MomentumPd;
use crate::error::{Error, Result};
use crate::spectral::{cf_to_pd, CfInput, UniformGridPair};

/// Aliases per cell folded into the reconstructed density.
const OVERSAMPLE: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MandelParams {
    /// Wave number of the exciting light.
    pub k0: f64,
    pub hbar: f64,
}

impl MandelParams {
    pub fn new(k0: f64) -> Result<Self> {
        Self::with_hbar(k0, 1.0)
    }

    pub fn with_hbar(k0: f64, hbar: f64) -> Result<Self> {
        if !(k0 > 0.0) || !k0.is_finite() {
            return Err(Error::InvalidParameter(format!("k0 must be positive, got {k0}")));
        }
        if !(hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { k0, hbar })
    }

    /// Φ(s) with s in the same units as 1/k0.
    pub fn cf(&self, s: f64) -> Complex64 {
        self.cf_scaled(self.k0 * s)
    }

    /// Φ as a function of x = k0·s.
    pub fn cf_scaled(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, x) * envelope(x)
    }

    /// Grid with 2^16 nodes on [−2ħk0, 14ħk0), nodes hitting 0 and 2ħk0 exactly.
    pub fn default_pair(&self) -> UniformGridPair {
        let scale = self.hbar * self.k0;
        UniformGridPair::with_window(-2.0 * scale, 16.0 * scale, 1 << 16, self.hbar)
            .expect("valid default grid")
    }
}

/// (3/2){sinc x + (cos x − sinc x)/x²}, the real factor multiplying e^{ix}.
fn envelope(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // (−1)^j (3/2)(2j+2)²/(2j+3)! x^{2j}
        let x2 = x * x;
        let mut coeff = 1.0;
        let mut sum = 1.0;
        let mut power = 1.0;
        for j in 1..=10 {
            let jf = j as f64;
            coeff *= -((2.0 * jf + 2.0) / (2.0 * jf)).powi(2) / ((2.0 * jf + 2.0) * (2.0 * jf + 3.0));
            power *= x2;
            sum += coeff * power;
        }
        sum
    } else {
        let sinc = x.sin() / x;
        1.5 * (sinc + (x.cos() - sinc) / (x * x))
    }
}

/// Closed-form CF evaluator.
pub fn mandel_cf(p: &MandelParams) -> impl Fn(f64) -> Complex64 + Send + Sync + Copy {
    let p = *p;
    move |s| p.cf(s)
}

/// Density reconstructed from the closed-form CF on the nodes of `pair`.
///
/// Each node receives the average of the density over its cell, computed by
/// folding an oversampled CF back into the pair's band before one inverse FFT.
pub fn mandel_pd(p: &MandelParams, pair: &UniformGridPair) -> Result<MomentumPd> {
    let scale = p.hbar * p.k0;
    if !(pair.q_min() < 0.0 && pair.q_max() > 2.0 * scale) {
        return Err(Error::InvalidGrid(format!(
            "momentum grid [{}, {}] must enclose [0, {}]",
            pair.q_min(),
            pair.q_max(),
            2.0 * scale
        )));
    }
    let ratio = scale / pair.hbar();
    let cf = move |s: f64| p.cf_scaled(ratio * s);
    cf_to_pd(CfInput::Function { cf: &cf, oversample: OVERSAMPLE }, pair)
}
