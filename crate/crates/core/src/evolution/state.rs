use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SeparationGrid;
use crate::levy::CharacteristicExponent;
use crate::models::MomentumPd;
use crate::spectral::{convolve_power, UniformGridPair};

/// Coherences ⟨x|ρ|y⟩ sampled at s = x − y.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OffDiagonalState {
    pub grid: SeparationGrid,
    pub values: Vec<Complex64>,
}

impl OffDiagonalState {
    pub fn new(grid: SeparationGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values on {} points", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite coherence".into()));
        }
        if let Some(z) = grid.zero_index() {
            let v = values[z];
            if !(v.re >= 0.0) || v.im.abs() > 1e-12 * v.re.max(1.0) {
                return Err(Error::InvalidParameter(format!("coherence at s = 0 must be real and non-negative, got {v}")));
            }
        }
        Ok(Self { grid, values })
    }

    /// Fully coherent state, all ones.
    pub fn ones(grid: &SeparationGrid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(1.0, 0.0); grid.len()],
        }
    }

    fn scaled_by(&self, factors: Vec<Complex64>) -> Self {
        let values = self.values.iter().zip(factors).map(|(v, f)| v * f).collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }
}

/// values ← e^{tΨ(s)}·values.
pub fn evolve_closed_form(state: &OffDiagonalState, psi: &CharacteristicExponent, t: f64) -> Result<OffDiagonalState> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(state.clone());
    }
    let psi_values = psi.eval_points(state.grid.points())?;
    Ok(state.scaled_by(psi_values.into_iter().map(|v| (v * t).exp()).collect()))
}

/// values ← Φ_pd(s)ⁿ·values.
pub fn apply_superoperator(pd: &MomentumPd, state: &OffDiagonalState, n: u32, hbar: f64) -> OffDiagonalState {
    if n == 0 {
        return state.clone();
    }
    let factors = state
        .grid
        .points()
        .par_iter()
        .map(|&s| pd.cf(s, hbar).powu(n))
        .collect();
    state.scaled_by(factors)
}

/// Same map computed from the n-fold convolved density, as an independent
/// route: the CF of pd∗…∗pd multiplies the state.
pub fn apply_superoperator_via_convolution(
    pd: &MomentumPd,
    state: &OffDiagonalState,
    n: u32,
    pair: &UniformGridPair,
) -> Result<OffDiagonalState> {
    if n == 0 {
        return Ok(state.clone());
    }
    let folded = convolve_power(pd, n, pair)?;
    let factors = state
        .grid
        .points()
        .par_iter()
        .map(|&s| folded.cf(s, pair.hbar()))
        .collect();
    Ok(state.scaled_by(factors))
}
