//! Numerical test of the integrability conditions on jump weights.
//!
//! The integrand is integrated over dyadic windows shrinking towards q = 0
//! and growing towards |q| = ∞. A summable tail shows up as a window ratio
//! below one; a ratio that stays at or above one signals divergence. This is
//! a heuristic: weights that change behaviour beyond 2^{±60} go unnoticed.

use serde::Serialize;

use super::triplet::JumpWeight;
use crate::error::{Error, Result};
use crate::spectral::quadrature::integrate_real;

const WINDOWS: i32 = 60;
/// Ratios are averaged over this many trailing windows.
const SPAN: i32 = 10;
const DIVERGENCE_RATIO: f64 = 1.0 - 1e-6;

/// Which integral is tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Condition {
    /// ∫|ω|² q²/(1+q²) dq < ∞.
    Levy,
    /// ∫|λ|² dq < ∞ (finite total rate).
    FiniteRate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevyReport {
    pub condition: Condition,
    /// Sum over the windows plus a geometric tail estimate.
    pub integral: f64,
    /// Largest per-window ratio towards q = 0 (both signs of q).
    pub small_q_ratio: f64,
    /// Largest per-window ratio towards |q| = ∞.
    pub large_q_ratio: f64,
    pub converges: bool,
}

fn window_integrals(f: &dyn Fn(f64) -> f64, towards_zero: bool) -> Result<Vec<f64>> {
    (0..=WINDOWS)
        .map(|k| {
            let (a, b) = if towards_zero {
                (2f64.powi(-k - 1), 2f64.powi(-k))
            } else {
                (2f64.powi(k), 2f64.powi(k + 1))
            };
            integrate_real(f, a, b, 1e-300, 1e-10)
        })
        .collect()
}

fn trailing_ratio(w: &[f64]) -> f64 {
    let n = w.len();
    let (last, first) = (w[n - 1], w[n - 1 - SPAN as usize]);
    if last == 0.0 {
        return 0.0;
    }
    if first == 0.0 {
        return f64::INFINITY;
    }
    (last / first).powf(1.0 / SPAN as f64)
}

/// Tests `weight` against `condition` on both half-lines.
pub fn levy_condition_check(weight: &JumpWeight, condition: Condition) -> Result<LevyReport> {
    if weight.is_zero() {
        return Ok(LevyReport {
            condition,
            integral: 0.0,
            small_q_ratio: 0.0,
            large_q_ratio: 0.0,
            converges: true,
        });
    }
    let mut integral = 0.0;
    let mut small = 0.0f64;
    let mut large = 0.0f64;
    for sign in [1.0, -1.0] {
        let f = |q: f64| {
            let x = sign * q;
            let w = weight.intensity(x);
            match condition {
                Condition::Levy => w * x * x / (1.0 + x * x),
                Condition::FiniteRate => w,
            }
        };
        for towards_zero in [true, false] {
            let w = window_integrals(&f, towards_zero)?;
            if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::NonIntegrableKernel("weight is negative or not finite".into()));
            }
            let r = trailing_ratio(&w);
            let tail = if r < 1.0 { w[w.len() - 1] * r / (1.0 - r) } else { f64::INFINITY };
            integral += w.iter().sum::<f64>() + tail;
            if towards_zero {
                small = small.max(r);
            } else {
                large = large.max(r);
            }
        }
    }
    Ok(LevyReport {
        condition,
        integral,
        small_q_ratio: small,
        large_q_ratio: large,
        converges: small < DIVERGENCE_RATIO && large < DIVERGENCE_RATIO,
    })
}

/// Errors with [`Error::LevyConditionViolated`] when the report diverges.
pub(crate) fn require(weight: &JumpWeight, condition: Condition) -> Result<LevyReport> {
    let r = levy_condition_check(weight, condition)?;
    if !r.converges {
        let (side, ratio) = if r.small_q_ratio >= DIVERGENCE_RATIO {
            ("small |q|", r.small_q_ratio)
        } else {
            ("large |q|", r.large_q_ratio)
        };
        let which = match condition {
            Condition::Levy => "omega",
            Condition::FiniteRate => "lambda",
        };
        return Err(Error::LevyConditionViolated { which, side, ratio });
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(alpha: f64) -> JumpWeight {
        JumpWeight::PowerLaw { scale: 1.0, alpha }
    }

    #[test]
    fn power_law_ratios() {
        let r = levy_condition_check(&power(1.5), Condition::Levy).unwrap();
        assert!(r.converges);
        assert!((r.small_q_ratio - 2f64.powf(-0.5)).abs() < 1e-6);
        assert!((r.large_q_ratio - 2f64.powf(-1.5)).abs() < 1e-6);
    }

    #[test]
    fn gaussian_intensity_has_finite_rate() {
        let w = JumpWeight::intensity_fn(|q| (-q * q).exp());
        let r = levy_condition_check(&w, Condition::FiniteRate).unwrap();
        assert!(r.converges);
        assert!((r.integral - std::f64::consts::PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn power_law_has_infinite_rate() {
        assert!(matches!(
            require(&power(0.5), Condition::FiniteRate),
            Err(Error::LevyConditionViolated { which: "lambda", .. })
        ));
    }
}
