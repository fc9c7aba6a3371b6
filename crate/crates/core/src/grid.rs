//! Separation grids s = x − y on which coherences are sampled.

use serde::Serialize;

use crate::error::{Error, Result};

/// Strictly increasing list of separations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationGrid {
    points: Vec<f64>,
}

impl SeparationGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("empty grid".into()));
        }
        if points.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidGrid("non-finite separation".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    /// `n` evenly spaced points on `[lo, hi]`, endpoints included.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 1 {
            return Self::new(vec![lo]);
        }
        if n == 0 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!("bad uniform grid {lo}:{hi}:{n}")));
        }
        let step = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + step * i as f64).collect();
        points[n - 1] = hi;
        // snap the midpoint of odd symmetric grids to an exact zero
        if n % 2 == 1 && (lo + hi).abs() <= 1e-12 * hi.abs() {
            points[n / 2] = 0.0;
            for i in 0..n / 2 {
                points[n - 1 - i] = -points[i];
            }
        }
        Self::new(points)
    }

    /// Symmetric uniform grid `{-m h, …, 0, …, m h}` with `2m + 1` points.
    pub fn symmetric(step: f64, m: usize) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidGrid("step must be positive".into()));
        }
        let points = (-(m as i64)..=m as i64).map(|k| k as f64 * step).collect();
        Self::new(points)
    }

    /// `n` logarithmically spaced positive points on `[lo, hi]`.
    pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) || n < 2 {
            return Err(Error::InvalidGrid(format!("bad log grid {lo}:{hi}:{n}")));
        }
        let (a, b) = (lo.ln(), hi.ln());
        let points = (0..n)
            .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
            .collect();
        Self::new(points)
    }

    /// Parses the `lo:hi:n` form used on the command line.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!("expected lo:hi:n, got '{spec}'")));
        }
        let bad = |_| Error::InvalidGrid(format!("cannot parse '{spec}'"));
        let lo: f64 = parts[0].trim().parse().map_err(bad)?;
        let hi: f64 = parts[1].trim().parse().map_err(bad)?;
        let n: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::InvalidGrid(format!("cannot parse count in '{spec}'")))?;
        Self::uniform(lo, hi, n)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Index of the point exactly equal to zero.
    pub fn zero_index(&self) -> Option<usize> {
        self.points.iter().position(|&s| s == 0.0)
    }

    /// True when every point has its mirror image in the grid (to 1e-12 relative).
    pub fn is_symmetric(&self) -> bool {
        let n = self.points.len();
        (0..n).all(|i| {
            let (a, b) = (self.points[i], self.points[n - 1 - i]);
            (a + b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
        })
    }

    /// Common spacing if the grid is uniform to 1e-9 relative.
    pub fn uniform_step(&self) -> Option<f64> {
        if self.points.len() < 2 {
            return None;
        }
        let n = self.points.len();
        let h = (self.points[n - 1] - self.points[0]) / (n - 1) as f64;
        let uniform = self
            .points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_symmetric_grid_has_exact_zero_and_mirrors() {
        let g = SeparationGrid::uniform(-5.0, 5.0, 101).unwrap();
        assert_eq!(g.zero_index(), Some(50));
        assert!(g.is_symmetric());
        assert!(g.uniform_step().is_some());
        for i in 0..101 {
            assert_eq!(g.points()[i], -g.points()[100 - i]);
        }
    }

    #[test]
    fn rejects_unsorted_points() {
        assert!(SeparationGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(SeparationGrid::new(vec![1.0, 0.0]).is_err());
        assert!(SeparationGrid::new(vec![]).is_err());
    }

    #[test]
    fn parses_cli_spec() {
        let g = SeparationGrid::parse_spec("-1:1:3").unwrap();
        assert_eq!(g.points(), &[-1.0, 0.0, 1.0]);
        assert!(SeparationGrid::parse_spec("-1:1").is_err());
        assert!(SeparationGrid::parse_spec("a:1:3").is_err());
    }

    #[test]
    fn log_grid_is_not_uniform() {
        let g = SeparationGrid::log_spaced(1e-2, 1e2, 9).unwrap();
        assert!(g.uniform_step().is_none());
        assert!((g.points()[4] - 1.0).abs() < 1e-12);
    }
}
