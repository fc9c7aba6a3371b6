use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::Tabulation;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A jump weight λ(q) or ω(q).
///
/// Intensity-only forms carry a zero phase, so their amplitude is √|·|².
#[derive(Clone)]
pub enum JumpWeight {
    Zero,
    /// Complex amplitude; the intensity is its squared modulus.
    Amplitude(ComplexFn),
    /// Intensity |·|² as a function of q.
    Intensity(RealFn),
    /// Intensity tabulated piecewise-linearly, zero outside the nodes.
    Tabulated(Tabulation),
    /// Intensity `scale/|q|^{α+1}`.
    PowerLaw { scale: f64, alpha: f64 },
}

impl fmt::Debug for JumpWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => f.write_str("Zero"),
            Self::Amplitude(_) => f.write_str("Amplitude(<fn>)"),
            Self::Intensity(_) => f.write_str("Intensity(<fn>)"),
            Self::Tabulated(t) => write!(f, "Tabulated({} nodes)", t.len()),
            Self::PowerLaw { scale, alpha } => write!(f, "PowerLaw {{ scale: {scale}, alpha: {alpha} }}"),
        }
    }
}

impl JumpWeight {
    pub fn amplitude_fn(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        Self::Amplitude(Arc::new(f))
    }

    pub fn intensity_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Intensity(Arc::new(f))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Zero)
    }

    pub fn intensity(&self, q: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Amplitude(a) => a(q).norm_sqr(),
            Self::Intensity(w) => w(q),
            Self::Tabulated(t) => t.value_at(q),
            Self::PowerLaw { scale, alpha } => scale * q.abs().powf(-alpha - 1.0),
        }
    }

    pub fn amplitude(&self, q: f64) -> Complex64 {
        match self {
            Self::Amplitude(a) => a(q),
            other => Complex64::new(other.intensity(q).max(0.0).sqrt(), 0.0),
        }
    }

    /// Momentum range outside which the weight vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Zero => (0.0, 0.0),
            Self::Tabulated(t) => t.support(),
            _ => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn singular_at_zero(&self) -> bool {
        matches!(self, Self::PowerLaw { .. })
    }
}

/// Drift, diffusion and the two jump weights of a Lévy generator.
#[derive(Debug, Clone)]
pub struct LevyTriplet {
    /// Units 1/(length·time).
    pub drift_a: f64,
    /// Units 1/(length²·time).
    pub diffusion_d: f64,
    /// Finite-rate part; |λ|² must be integrable.
    pub lambda: JumpWeight,
    /// Part that may diverge at q = 0 and is compensated.
    pub omega: JumpWeight,
    pub q0: f64,
    pub hbar: f64,
}

impl Default for LevyTriplet {
    fn default() -> Self {
        Self {
            drift_a: 0.0,
            diffusion_d: 0.0,
            lambda: JumpWeight::Zero,
            omega: JumpWeight::Zero,
            q0: 1.0,
            hbar: 1.0,
        }
    }
}

impl LevyTriplet {
    pub fn gaussian(drift_a: f64, diffusion_d: f64) -> Self {
        Self {
            drift_a,
            diffusion_d,
            ..Self::default()
        }
    }

    pub fn with_lambda(mut self, w: JumpWeight) -> Self {
        self.lambda = w;
        self
    }

    pub fn with_omega(mut self, w: JumpWeight, q0: f64) -> Self {
        self.omega = w;
        self.q0 = q0;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.drift_a.is_finite() {
            return Err(Error::InvalidParameter(format!("drift a = {}", self.drift_a)));
        }
        if !(self.diffusion_d >= 0.0) || !self.diffusion_d.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "diffusion D must be non-negative, got {}",
                self.diffusion_d
            )));
        }
        if !(self.q0 > 0.0) || !self.q0.is_finite() {
            return Err(Error::InvalidParameter(format!("q0 must be positive, got {}", self.q0)));
        }
        if !(self.hbar > 0.0) || !self.hbar.is_finite() {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        for w in [&self.lambda, &self.omega] {
            if let JumpWeight::PowerLaw { scale, alpha } = w {
                if !(*scale >= 0.0) || !alpha.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "power-law weight needs scale >= 0 and finite alpha, got {scale}, {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }
}
