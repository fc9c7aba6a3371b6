//! Transforms between momentum densities and characteristic functions.
//!
//! Convention: Φ(s) = ∫P(q) e^{iqs/ħ} dq. Tabulated densities are transformed
//! exactly as piecewise-linear functions, so Φ of a tabulation is the true CF
//! of the interpolated density rather than a Riemann-sum approximation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::tabulation::{end_corrections, sinc, Tabulation};
use crate::models::MomentumPd;

/// Mass allowed outside the momentum window before a transform refuses.
const SUPPORT_TOL: f64 = 1e-9;
/// Largest renormalization accepted when densities are reconstructed.
const MASS_TOL: f64 = 1e-6;

/// Even momentum grid `q_j = q_min + jΔq` and its conjugate separations
/// `s_k = (k − n/2)Δs`, `Δs = 2πħ/(nΔq)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UniformGridPair {
    q_min: f64,
    dq: f64,
    n: usize,
    hbar: f64,
}

impl UniformGridPair {
    pub fn new(q_min: f64, dq: f64, n: usize, hbar: f64) -> Result<Self> {
        if !n.is_power_of_two() || n < 4 {
            return Err(Error::InvalidGrid(format!("point count {n} is not a power of two >= 4")));
        }
        if !(dq > 0.0) || !q_min.is_finite() || !(hbar > 0.0) {
            return Err(Error::InvalidGrid(format!("bad pair q_min={q_min}, dq={dq}, hbar={hbar}")));
        }
        Ok(Self { q_min, dq, n, hbar })
    }

    /// Window `[q_min, q_min + length)` split into `n` cells.
    pub fn with_window(q_min: f64, length: f64, n: usize, hbar: f64) -> Result<Self> {
        Self::new(q_min, length / n as f64, n, hbar)
    }

    pub fn q_min(&self) -> f64 {
        self.q_min
    }

    pub fn q_max(&self) -> f64 {
        self.q(self.n - 1)
    }

    pub fn dq(&self) -> f64 {
        self.dq
    }

    pub fn ds(&self) -> f64 {
        2.0 * PI * self.hbar / (self.n as f64 * self.dq)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn q(&self, j: usize) -> f64 {
        self.q_min + self.dq * j as f64
    }

    pub fn s(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.ds()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.q(j)).collect()
    }

    pub fn separations(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.s(k)).collect()
    }

    /// Index of `s = 0` in [`separations`](Self::separations).
    pub fn zero_index(&self) -> usize {
        self.n / 2
    }
}

/// Σ_j v_j e^{i q_j s_k/ħ} for every separation of the pair.
fn phase_sums(values: &[f64], pair: &UniformGridPair) -> Vec<Complex64> {
    let n = pair.len();
    // e^{iq_j s_k/ħ} = e^{iq_min s_k/ħ}·(−1)^j·e^{2πijk/n}
    let mut buf: Vec<Complex64> = values
        .iter()
        .enumerate()
        .map(|(j, &v)| Complex64::new(if j % 2 == 0 { v } else { -v }, 0.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    buf.iter()
        .enumerate()
        .map(|(k, &z)| z * Complex64::from_polar(1.0, pair.q_min() * pair.s(k) / pair.hbar()))
        .collect()
}

/// Exact transform of a piecewise-linear sequence on the pair's momentum nodes,
/// evaluated at every separation of the pair. Linear in `values`.
pub fn transform_samples(values: &[f64], pair: &UniformGridPair) -> Result<Vec<Complex64>> {
    if values.len() != pair.len() {
        return Err(Error::InvalidGrid(format!(
            "{} samples on a {}-point grid",
            values.len(),
            pair.len()
        )));
    }
    let n = pair.len();
    let dq = pair.dq();
    let sums = phase_sums(values, pair);
    let mut out: Vec<Complex64> = (0..n)
        .map(|k| {
            let w = pair.s(k) / pair.hbar();
            let sx = sinc(0.5 * w * dq);
            sums[k] * (dq * sx * sx)
                - end_corrections(pair.q_min(), pair.q_max(), dq, values[0], values[n - 1], w)
        })
        .collect();
    // exact Hermitian symmetry for the mirrored separations
    for k in 1..n / 2 {
        out[n - k] = out[k].conj();
    }
    out[n / 2] = Complex64::new(out[n / 2].re, 0.0);
    Ok(out)
}

fn check_support(pd: &MomentumPd, lo: f64, hi: f64) -> Result<()> {
    let outside = 1.0 - pd.mass_between(lo, hi);
    if outside > SUPPORT_TOL {
        return Err(Error::SupportClipped(outside));
    }
    Ok(())
}

/// Φ of `pd` at every separation of `pair`.
///
/// Tabulations on the pair's own nodes go through one FFT; other tabulations
/// are transformed segment by segment; closed forms use their closed-form CF.
pub fn pd_to_cf(pd: &MomentumPd, pair: &UniformGridPair) -> Result<Vec<Complex64>> {
    check_support(pd, pair.q_min() - 0.5 * pair.dq(), pair.q_max() + 0.5 * pair.dq())?;
    match pd {
        MomentumPd::Tabulated(t)
            if t.uniform_spacing() == Some((pair.q_min(), pair.dq())) && t.len() == pair.len() =>
        {
            transform_samples(t.values(), pair)
        }
        _ => Ok(pd_to_cf_at(pd, &pair.separations(), pair.hbar())),
    }
}

/// Φ of `pd` at arbitrary separations, in parallel over points.
pub fn pd_to_cf_at(pd: &MomentumPd, points: &[f64], hbar: f64) -> Vec<Complex64> {
    points.par_iter().map(|&s| pd.cf(s, hbar)).collect()
}

/// Characteristic-function data to invert.
pub enum CfInput<'a> {
    /// Values at the separations of the pair.
    Samples(&'a [Complex64]),
    /// An evaluator, sampled `oversample` times beyond the pair's band and
    /// folded back so each node receives the average over its cell.
    Function {
        cf: &'a (dyn Fn(f64) -> Complex64 + Sync),
        oversample: usize,
    },
}

fn check_hermitian(values: &[Complex64]) -> Result<()> {
    let n = values.len();
    let mut worst = values[n / 2].im.abs();
    for k in 1..n / 2 {
        worst = worst.max((values[n / 2 + k] - values[n / 2 - k].conj()).norm());
    }
    if worst > 1e-8 {
        return Err(Error::NonHermitianInput(worst));
    }
    Ok(())
}

/// Inverts a CF into a density on the pair's momentum nodes.
///
/// Negative ringing is clipped and the result renormalized; if that changes
/// the mass by more than 1e−6 the grid cannot represent the density.
pub fn cf_to_pd(input: CfInput<'_>, pair: &UniformGridPair) -> Result<MomentumPd> {
    let n = pair.len();
    let ds = pair.ds();
    let hbar = pair.hbar();
    // folded[m] collects Φ(s)·e^{−iq_min s/ħ} over all s ≡ s_m on the pair
    let folded: Vec<Complex64> = match input {
        CfInput::Samples(values) => {
            if values.len() != n {
                return Err(Error::InvalidGrid(format!("{} CF samples for {n} nodes", values.len())));
            }
            check_hermitian(values)?;
            (0..n)
                .map(|k| values[k] * Complex64::from_polar(1.0, -pair.q_min() * pair.s(k) / hbar))
                .collect()
        }
        CfInput::Function { cf, oversample } => {
            let m = oversample.max(1);
            let base: Vec<Complex64> = (0..n).map(|k| cf(pair.s(k))).collect();
            check_hermitian(&base)?;
            let half = (m * n / 2) as i64;
            (0..n)
                .into_par_iter()
                .map(|k| {
                    // offset of fold k inside the oversampled band
                    let k0 = k as i64 - (n / 2) as i64;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in -(m as i64)..=m as i64 {
                        let idx = k0 + r * n as i64;
                        if idx < -half || idx >= half {
                            continue;
                        }
                        let s = idx as f64 * ds;
                        let window = sinc(0.5 * s * pair.dq() / hbar);
                        acc += cf(s) * window * Complex64::from_polar(1.0, -pair.q_min() * s / hbar);
                    }
                    acc
                })
                .collect()
        }
    };
    // p_j = (Δs/2πħ) Σ_k folded_k e^{−i jΔq s_k/ħ}, with s_k = (k − n/2)Δs
    let mut buf = folded;
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = ds / (2.0 * PI * hbar);
    let raw: Vec<f64> = buf
        .iter()
        .enumerate()
        .map(|(j, z)| if j % 2 == 0 { z.re } else { -z.re } * scale)
        .collect();
    renormalized(raw, pair)
}

fn renormalized(mut values: Vec<f64>, pair: &UniformGridPair) -> Result<MomentumPd> {
    for v in values.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let t = Tabulation::uniform(pair.q_min(), pair.dq(), values)?;
    let mass = t.integral();
    if !((mass - 1.0).abs() <= MASS_TOL) {
        return Err(Error::GridTooCoarse((mass - 1.0).abs()));
    }
    Ok(MomentumPd::Tabulated(t.scaled(1.0 / mass)))
}

/// Momenta below and above which at most `tail` of the mass lies.
fn mass_quantiles(t: &Tabulation, tail: f64) -> (f64, f64) {
    let (q, p) = (t.nodes(), t.values());
    let cells: Vec<f64> = p.windows(2).zip(q.windows(2)).map(|(v, x)| 0.5 * (v[0] + v[1]) * (x[1] - x[0])).collect();
    let mut acc = 0.0;
    let mut lo = q[0];
    for (i, c) in cells.iter().enumerate() {
        acc += c;
        if acc > tail {
            lo = q[i];
            break;
        }
    }
    acc = 0.0;
    let mut hi = q[q.len() - 1];
    for (i, c) in cells.iter().enumerate().rev() {
        acc += c;
        if acc > tail {
            hi = q[i + 1];
            break;
        }
    }
    (lo, hi)
}

/// n-fold self-convolution pd∗…∗pd on the pair's momentum nodes.
///
/// Computed as the n-th power of the discrete CF followed by the inverse
/// transform. Refuses when the n-fold support would wrap around the window.
pub fn convolve_power(pd: &MomentumPd, n: u32, pair: &UniformGridPair) -> Result<MomentumPd> {
    if n == 0 {
        return Err(Error::InvalidParameter("convolution power must be >= 1".into()));
    }
    check_support(pd, pair.q_min() - 0.5 * pair.dq(), pair.q_max() + 0.5 * pair.dq())?;
    let t = pd.tabulate_on(pair)?;
    let (lo, hi) = mass_quantiles(&t, SUPPORT_TOL);
    let nf = n as f64;
    if nf * lo < pair.q_min() || nf * hi > pair.q_max() {
        return Err(Error::WindowTooNarrow(format!(
            "{n}-fold support [{}, {}] exceeds window [{}, {}]",
            nf * lo,
            nf * hi,
            pair.q_min(),
            pair.q_max()
        )));
    }
    let sums = phase_sums(t.values(), pair);
    let dq = pair.dq();
    let powered: Vec<Complex64> = sums.iter().map(|z| (z * dq).powu(n)).collect();
    let result = cf_to_pd(CfInput::Samples(&hermitian_part(powered)), pair)?;

    let edge = (pair.q_max() - pair.q_min()) / 64.0;
    let rt = result.as_tabulation().expect("tabulated result");
    let edge_mass = rt.integral_between(pair.q_min(), pair.q_min() + edge)
        + rt.integral_between(pair.q_max() - edge, pair.q_max());
    if edge_mass > SUPPORT_TOL {
        return Err(Error::WindowTooNarrow(format!("{edge_mass:e} of the mass reaches the window edges")));
    }
    Ok(result)
}

/// Enforces exact mirror symmetry, removing FFT rounding asymmetry.
fn hermitian_part(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.len();
    for k in 1..n / 2 {
        let avg = 0.5 * (v[n / 2 + k] + v[n / 2 - k].conj());
        v[n / 2 + k] = avg;
        v[n / 2 - k] = avg.conj();
    }
    v[n / 2].im = 0.0;
    v
}
