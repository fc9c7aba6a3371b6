//! Compound-Poisson decoherence against its second-order Gaussian limit as
//! the mean number of events grows.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SeparationGrid;
use crate::models::{pd_moments, MomentumPd};

/// Only points where the compound-Poisson modulus exceeds this enter the metric.
const DIVERGENCE_FLOOR: f64 = 0.1;
/// Far-separation probe for the plateau, in units of ħ/q_rms.
const PLATEAU_DISTANCE: f64 = 1e7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionRow {
    pub nbar: f64,
    pub s: f64,
    pub abs_cf_compound: f64,
    pub abs_cf_gaussian: f64,
    /// Metric of this row's n̄, repeated on every row.
    pub divergence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionSummary {
    pub nbar: f64,
    /// max |Φ_CP| − |Φ_G| over points with |Φ_CP| > 0.1.
    pub divergence: f64,
    /// |Φ_CP| far beyond the decay scale of the single-event CF.
    pub plateau: f64,
    pub plateau_separation: f64,
    /// e^{−n̄}
    pub expected_plateau: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionReport {
    pub mean: f64,
    pub second_moment: f64,
    pub summaries: Vec<TransitionSummary>,
    pub rows: Vec<TransitionRow>,
}

impl TransitionReport {
    pub const COLUMNS: [&'static str; 5] = ["nbar", "s", "abs_cf_compound", "abs_cf_gaussian", "divergence"];

    /// Header plus one line per row, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::COLUMNS.join(","))?;
        for r in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                r.nbar, r.s, r.abs_cf_compound, r.abs_cf_gaussian, r.divergence
            )?;
        }
        Ok(())
    }
}

/// For each n̄, |e^{n̄(Φ−1)}| and |e^{n̄(i⟨q⟩s/ħ − ⟨q²⟩s²/2ħ²)}| on the grid.
pub fn transition_scan(pd: &MomentumPd, nbar_list: &[f64], grid: &SeparationGrid, hbar: f64) -> Result<TransitionReport> {
    if nbar_list.is_empty() {
        return Err(Error::InvalidParameter("empty list of mean event numbers".into()));
    }
    if let Some(bad) = nbar_list.iter().find(|n| !(**n >= 0.0) || !n.is_finite()) {
        return Err(Error::InvalidParameter(format!("mean event number {bad}")));
    }
    let (m1, m2) = pd_moments(pd)?;
    let cf: Vec<Complex64> = grid.points().par_iter().map(|&s| pd.cf(s, hbar)).collect();
    let q_rms = m2.sqrt();
    let far = if q_rms > 0.0 { PLATEAU_DISTANCE * hbar / q_rms } else { PLATEAU_DISTANCE * hbar };
    let cf_far = pd.cf(far, hbar);

    let per_nbar: Vec<(TransitionSummary, Vec<TransitionRow>)> = nbar_list
        .par_iter()
        .map(|&nbar| {
            let pairs: Vec<(f64, f64, f64)> = grid
                .points()
                .iter()
                .zip(&cf)
                .map(|(&s, &phi)| {
                    let compound = ((phi - 1.0) * nbar).exp().norm();
                    let w = s / hbar;
                    let gaussian = (-0.5 * nbar * m2 * w * w).exp();
                    (s, compound, gaussian)
                })
                .collect();
            let divergence = pairs
                .iter()
                .filter(|p| p.1 > DIVERGENCE_FLOOR)
                .map(|p| (p.1 - p.2).abs())
                .fold(0.0, f64::max);
            let rows = pairs
                .iter()
                .map(|&(s, c, g)| TransitionRow {
                    nbar,
                    s,
                    abs_cf_compound: c,
                    abs_cf_gaussian: g,
                    divergence,
                })
                .collect();
            let summary = TransitionSummary {
                nbar,
                divergence,
                plateau: ((cf_far - 1.0) * nbar).exp().norm(),
                plateau_separation: far,
                expected_plateau: (-nbar).exp(),
            };
            (summary, rows)
        })
        .collect();

    let mut summaries = Vec::with_capacity(per_nbar.len());
    let mut rows = Vec::with_capacity(per_nbar.len() * grid.len());
    for (s, r) in per_nbar {
        summaries.push(s);
        rows.extend(r);
    }
    Ok(TransitionReport {
        mean: m1,
        second_moment: m2,
        summaries,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MandelParams;

    #[test]
    fn zero_mean_rows_are_ones() {
        let pd = MomentumPd::mandel(MandelParams::new(1.0).unwrap());
        let grid = SeparationGrid::uniform(-5.0, 5.0, 21).unwrap();
        let r = transition_scan(&pd, &[0.0], &grid, 1.0).unwrap();
        assert!(r.rows.iter().all(|row| row.abs_cf_compound == 1.0 && row.abs_cf_gaussian == 1.0));
        assert_eq!(r.summaries[0].divergence, 0.0);
    }

    #[test]
    fn empty_list_is_an_error() {
        let pd = MomentumPd::point_mass(1.0);
        let grid = SeparationGrid::uniform(-1.0, 1.0, 3).unwrap();
        assert!(transition_scan(&pd, &[], &grid, 1.0).is_err());
    }

    #[test]
    fn csv_has_fixed_columns() {
        let pd = MomentumPd::point_mass(1.0);
        let grid = SeparationGrid::uniform(-1.0, 1.0, 3).unwrap();
        let r = transition_scan(&pd, &[1.0], &grid, 1.0).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("nbar,s,abs_cf_compound,abs_cf_gaussian,divergence\n"));
        assert_eq!(text.lines().count(), 4);
    }
}
