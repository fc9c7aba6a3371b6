//! Momentum-transfer probability densities.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::Serialize;
use libm::erfc;

use super::mandel::{mandel_pd, MandelParams};
use super::tabulation::{sinc, Tabulation};
use crate::error::{Error, Result};
use crate::spectral::UniformGridPair;

/// A normalized density of momentum transfers `q`.
///
/// Tabulated densities are linear between nodes and zero outside them.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MomentumPd {
    Tabulated(Tabulation),
    Gaussian { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    PointMass { at: f64 },
    Mandel(MandelParams),
}

impl MomentumPd {
    /// Normalizes a non-negative tabulation to unit mass.
    pub fn tabulated(t: Tabulation) -> Result<Self> {
        let mass = t.integral();
        if !(mass > 0.0) {
            return Err(Error::ZeroKernel);
        }
        Ok(Self::Tabulated(t.scaled(1.0 / mass)))
    }

    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        if !(std > 0.0) || !mean.is_finite() {
            return Err(Error::InvalidParameter(format!("bad Gaussian mean={mean}, std={std}")));
        }
        Ok(Self::Gaussian { mean, std })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidParameter(format!("bad uniform support [{lo}, {hi}]")));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn point_mass(at: f64) -> Self {
        Self::PointMass { at }
    }

    pub fn mandel(p: MandelParams) -> Self {
        Self::Mandel(p)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Tabulated(_) => "tabulated",
            Self::Gaussian { .. } => "gaussian",
            Self::Uniform { .. } => "uniform",
            Self::PointMass { .. } => "point_mass",
            Self::Mandel(_) => "mandel",
        }
    }

    /// Φ(s) = ∫pd(q) e^{iqs/ħ} dq.
    pub fn cf(&self, s: f64, hbar: f64) -> Complex64 {
        let w = s / hbar;
        match self {
            Self::Tabulated(t) => t.transform(w),
            Self::Gaussian { mean, std } => Complex64::new(-0.5 * (std * w).powi(2), mean * w).exp(),
            Self::Uniform { lo, hi } => {
                Complex64::from_polar(1.0, 0.5 * (lo + hi) * w) * sinc(0.5 * (hi - lo) * w)
            }
            Self::PointMass { at } => Complex64::from_polar(1.0, at * w),
            Self::Mandel(m) => m.cf_scaled(m.hbar * m.k0 * w),
        }
    }

    /// Probability mass in `[lo, hi]`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        match self {
            Self::Tabulated(t) => t.integral_between(lo, hi),
            Self::Gaussian { mean, std } => {
                let z = |x: f64| (x - mean) / (std * SQRT_2);
                0.5 * (erfc(z(lo)) - erfc(z(hi)))
            }
            Self::Uniform { lo: a, hi: b } => (hi.min(*b) - lo.max(*a)).max(0.0) / (b - a),
            Self::PointMass { at } => {
                if *at >= lo && *at <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Mandel(m) => {
                let scale = m.hbar * m.k0;
                let cdf = |q: f64| {
                    let u = (q / scale - 1.0).clamp(-1.0, 1.0);
                    0.5 + 0.375 * (u + u * u * u / 3.0)
                };
                cdf(hi) - cdf(lo)
            }
        }
    }

    /// Values on the momentum nodes of `pair`, as a normalized tabulation.
    ///
    /// Discontinuous densities are cell-averaged; a point mass is split
    /// linearly between its two neighbouring nodes.
    pub fn tabulate_on(&self, pair: &UniformGridPair) -> Result<Tabulation> {
        let q = pair.momenta();
        let dq = pair.dq();
        let values: Vec<f64> = match self {
            Self::Mandel(m) => return mandel_pd(m, pair).map(|pd| pd.into_tabulation()),
            Self::Tabulated(t) if t.uniform_spacing() == Some((pair.q_min(), dq)) && t.len() == pair.len() => {
                return Ok(t.clone());
            }
            Self::Tabulated(t) => q.iter().map(|&x| t.value_at(x)).collect(),
            Self::Gaussian { mean, std } => q
                .iter()
                .map(|&x| (-0.5 * ((x - mean) / std).powi(2)).exp() / (std * (2.0 * PI).sqrt()))
                .collect(),
            Self::Uniform { .. } => q
                .iter()
                .map(|&x| self.mass_between(x - 0.5 * dq, x + 0.5 * dq) / dq)
                .collect(),
            Self::PointMass { at } => {
                let pos = (at - pair.q_min()) / dq;
                let j = pos.floor();
                if j < 0.0 || j as usize + 1 >= pair.len() {
                    return Err(Error::SupportClipped(1.0));
                }
                let frac = pos - j;
                let mut v = vec![0.0; pair.len()];
                v[j as usize] = (1.0 - frac) / dq;
                v[j as usize + 1] += frac / dq;
                v
            }
        };
        let t = Tabulation::uniform(pair.q_min(), dq, values)?;
        let mass = t.integral();
        if !(mass > 0.0) {
            return Err(Error::SupportClipped(1.0));
        }
        Ok(t.scaled(1.0 / mass))
    }

    /// The tabulation of a tabulated density.
    pub fn as_tabulation(&self) -> Option<&Tabulation> {
        match self {
            Self::Tabulated(t) => Some(t),
            _ => None,
        }
    }

    pub fn into_tabulation(self) -> Tabulation {
        match self {
            Self::Tabulated(t) => t,
            _ => panic!("into_tabulation on a closed-form density"),
        }
    }

    /// Typical momentum scale, used as the default compensator scale.
    pub fn scale(&self) -> f64 {
        match self {
            Self::Tabulated(t) => (t.second_moment().max(0.0)).sqrt().max(f64::MIN_POSITIVE),
            Self::Gaussian { mean, std } => (mean * mean + std * std).sqrt(),
            Self::Uniform { lo, hi } => ((lo * lo + lo * hi + hi * hi) / 3.0).sqrt(),
            Self::PointMass { at } => at.abs(),
            Self::Mandel(m) => m.hbar * m.k0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_cf_is_a_phase() {
        let pd = MomentumPd::point_mass(1.5);
        for &s in &[-2.0, 0.0, 0.7] {
            let v = pd.cf(s, 1.0);
            assert!((v.norm() - 1.0).abs() < 1e-15);
            assert!((v.arg() - (1.5 * s)).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_cf_closed_form() {
        let pd = MomentumPd::uniform(0.0, 2.0).unwrap();
        let v = pd.cf(1.0, 1.0);
        let exact = Complex64::from_polar(1.0, 1.0) * 1f64.sin();
        assert!((v - exact).norm() < 1e-15);
    }

    #[test]
    fn gaussian_mass_between() {
        let pd = MomentumPd::gaussian(1.0, 2.0).unwrap();
        assert!((pd.mass_between(1.0, f64::INFINITY) - 0.5).abs() < 1e-15);
        let m = pd.mass_between(-1.0, 3.0);
        assert!((m - 0.682_689_492_137_085_9).abs() < 1e-12, "{m}");
    }

    #[test]
    fn tabulated_is_normalized() {
        let t = Tabulation::new(vec![0.0, 1.0], vec![3.0, 3.0]).unwrap();
        let pd = MomentumPd::tabulated(t).unwrap();
        assert!((pd.cf(0.0, 1.0).re - 1.0).abs() < 1e-15);
        let zero = Tabulation::new(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(MomentumPd::tabulated(zero), Err(Error::ZeroKernel)));
    }
}
