use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SeparationGrid;
use crate::levy::DecoherenceFactor;
use crate::models::Tabulation;

/// Non-negative weights over path separations, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSeparationWeights {
    pub grid: SeparationGrid,
    pub weights: Vec<f64>,
}

impl PathSeparationWeights {
    pub fn new(grid: SeparationGrid, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} weights on {} points", weights.len(), grid.len())));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::UnnormalizedWeights(total));
        }
        Ok(Self { grid, weights })
    }

    pub fn uniform(grid: &SeparationGrid) -> Self {
        let w = 1.0 / grid.len() as f64;
        Self {
            grid: grid.clone(),
            weights: vec![w; grid.len()],
        }
    }

    pub fn point_mass(s: f64) -> Self {
        Self {
            grid: SeparationGrid::new(vec![s]).expect("finite separation"),
            weights: vec![1.0],
        }
    }

    /// Weights read from a two-column tabulation, used as given.
    pub fn from_tabulation(t: &Tabulation) -> Result<Self> {
        Self::new(SeparationGrid::new(t.nodes().to_vec())?, t.values().to_vec())
    }
}

/// V = |Σ w(s)Φ(s)| for any evaluator of Φ.
pub fn visibility_fn(phi: impl Fn(f64) -> Complex64, w: &PathSeparationWeights) -> f64 {
    let sum = w
        .grid
        .points()
        .iter()
        .zip(&w.weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (&s, &wi)| acc + phi(s) * wi);
    sum.norm().min(1.0)
}

/// V = |Σ w(s)Φ(t,s)| with Φ sampled on the weights' own grid.
pub fn visibility(phi: &DecoherenceFactor, w: &PathSeparationWeights) -> Result<f64> {
    if phi.grid != w.grid {
        return Err(Error::InvalidGrid("factor and weights use different grids".into()));
    }
    let sum = phi
        .values
        .iter()
        .zip(&w.weights)
        .fold(Complex64::new(0.0, 0.0), |acc, (v, &wi)| acc + v * wi);
    Ok(sum.norm().min(1.0))
}
