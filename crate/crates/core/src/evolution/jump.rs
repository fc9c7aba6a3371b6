//! Poisson-weighted powers of a single-event characteristic function.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use libm::lgamma as ln_gamma;

use super::state::OffDiagonalState;
use crate::error::{Error, Result};

/// Scattering rate: constant, or tabulated against time (linear in between).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RateSpec {
    Constant(f64),
    Tabulated { times: Vec<f64>, rates: Vec<f64> },
}

/// How the number-of-events weights p_n are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CountModel {
    Poisson,
    /// Discretized normal with the given variance (default n̄); not a
    /// Markovian evolution, kept for comparison with fitted data.
    Gaussian { variance: Option<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpConfig {
    pub rate: RateSpec,
    pub horizon: f64,
    /// Highest event number kept; `None` picks ⌈n̄ + 10√(n̄+1)⌉.
    pub truncation: Option<usize>,
    pub tail_tol: f64,
    pub count_model: CountModel,
}

impl JumpConfig {
    pub fn constant(rate: f64, horizon: f64) -> Self {
        Self {
            rate: RateSpec::Constant(rate),
            horizon,
            truncation: None,
            tail_tol: 1e-10,
            count_model: CountModel::Poisson,
        }
    }

    /// Rate history Γ(t); `times` must start at 0.
    pub fn tabulated(times: Vec<f64>, rates: Vec<f64>, horizon: f64) -> Self {
        Self {
            rate: RateSpec::Tabulated { times, rates },
            ..Self::constant(0.0, horizon)
        }
    }

    /// Configuration whose mean event number is exactly `nbar` (rate n̄, t = 1).
    pub fn with_mean(nbar: f64) -> Self {
        Self::constant(nbar, 1.0)
    }

    pub fn with_truncation(mut self, n: usize) -> Self {
        self.truncation = Some(n);
        self
    }

    pub fn with_tail_tol(mut self, tol: f64) -> Self {
        self.tail_tol = tol;
        self
    }

    pub fn with_count_model(mut self, m: CountModel) -> Self {
        self.count_model = m;
        self
    }

    /// n̄ = Γt, or ∫₀ᵗΓ(t′)dt′ for a rate history.
    pub fn mean_count(&self) -> Result<f64> {
        if !(self.horizon >= 0.0) {
            return Err(Error::NegativeTime(self.horizon));
        }
        if !(self.tail_tol > 0.0) {
            return Err(Error::InvalidParameter(format!("tail_tol must be positive, got {}", self.tail_tol)));
        }
        let nbar = match &self.rate {
            RateSpec::Constant(g) => {
                if !(*g >= 0.0) || !g.is_finite() {
                    return Err(Error::InvalidParameter(format!("rate must be non-negative, got {g}")));
                }
                g * self.horizon
            }
            RateSpec::Tabulated { times, rates } => integrate_history(times, rates, self.horizon)?,
        };
        if !nbar.is_finite() {
            return Err(Error::InvalidParameter(format!("mean event number {nbar}")));
        }
        Ok(nbar)
    }
}

fn integrate_history(times: &[f64], rates: &[f64], t: f64) -> Result<f64> {
    if times.len() != rates.len() || times.len() < 2 {
        return Err(Error::InvalidParameter("rate history needs matching times and rates".into()));
    }
    if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("rate history times must start at 0 and increase".into()));
    }
    if rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter("rates must be non-negative".into()));
    }
    if t > times[times.len() - 1] {
        return Err(Error::InvalidParameter(format!(
            "horizon {t} beyond the rate history end {}",
            times[times.len() - 1]
        )));
    }
    let mut total = 0.0;
    for i in 0..times.len() - 1 {
        let (a, b) = (times[i], times[i + 1]);
        if a >= t {
            break;
        }
        let r = b.min(t);
        let rate_r = rates[i] + (rates[i + 1] - rates[i]) * (r - a) / (b - a);
        total += 0.5 * (r - a) * (rates[i] + rate_r);
    }
    Ok(total)
}

/// Weights p_0 … p_N with the mass left beyond N.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountWeights {
    pub nbar: f64,
    pub weights: Vec<f64>,
    /// Σ_{n>N} p_n.
    pub tail: f64,
    pub markovian: bool,
}

pub fn default_truncation(nbar: f64) -> usize {
    (nbar + 10.0 * (nbar + 1.0).sqrt()).ceil() as usize
}

fn ln_poisson(n: usize, nbar: f64) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    n as f64 * nbar.ln() - nbar - ln_gamma(n as f64 + 1.0)
}

/// Σ_{n>N} p_n by summing terms until they stop mattering.
fn poisson_tail(truncation: usize, nbar: f64) -> f64 {
    let mut tail = 0.0;
    let mut n = truncation + 1;
    loop {
        let term = ln_poisson(n, nbar).exp();
        tail += term;
        if (n as f64 > nbar && term <= 1e-17 * tail) || term == 0.0 && n as f64 > nbar {
            return tail;
        }
        n += 1;
    }
}

/// Poisson weights p_n = n̄ⁿe^{−n̄}/n!, or the Gaussian alternative.
pub fn poisson_weights(cfg: &JumpConfig) -> Result<CountWeights> {
    let nbar = cfg.mean_count()?;
    let truncation = cfg.truncation.unwrap_or_else(|| default_truncation(nbar));
    match cfg.count_model {
        CountModel::Poisson => {
            let weights: Vec<f64> = (0..=truncation).map(|n| ln_poisson(n, nbar).exp()).collect();
            let tail = poisson_tail(truncation, nbar);
            if tail > cfg.tail_tol {
                let mut suggested = truncation.max(default_truncation(nbar));
                while poisson_tail(suggested, nbar) > cfg.tail_tol {
                    suggested += 1 + suggested / 8;
                }
                return Err(Error::TruncationTooSmall {
                    truncation,
                    tail,
                    tol: cfg.tail_tol,
                    suggested,
                });
            }
            Ok(CountWeights { nbar, weights, tail, markovian: true })
        }
        CountModel::Gaussian { variance } => {
            let var = variance.unwrap_or(nbar);
            if !(var > 0.0) {
                return Err(Error::InvalidParameter(format!("count variance must be positive, got {var}")));
            }
            let raw: Vec<f64> = (0..=truncation)
                .map(|n| (-(n as f64 - nbar).powi(2) / (2.0 * var)).exp())
                .collect();
            let total: f64 = raw.iter().sum();
            Ok(CountWeights {
                nbar,
                weights: raw.iter().map(|w| w / total).collect(),
                tail: 0.0,
                markovian: false,
            })
        }
    }
}

/// values ← Σₙ pₙ Φ(s)ⁿ · values.
pub fn jump_expansion_evolve(
    state: &OffDiagonalState,
    cf: &(dyn Fn(f64) -> Complex64 + Sync),
    cfg: &JumpConfig,
) -> Result<(OffDiagonalState, CountWeights)> {
    let w = poisson_weights(cfg)?;
    let values = state
        .grid
        .points()
        .par_iter()
        .zip(state.values.par_iter())
        .map(|(&s, &v)| {
            let phi = cf(s);
            let sum = w.weights.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &p| acc * phi + p);
            sum * v
        })
        .collect();
    Ok((OffDiagonalState::new(state.grid.clone(), values)?, w))
}
