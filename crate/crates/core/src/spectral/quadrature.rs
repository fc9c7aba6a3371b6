//! Globally adaptive Gauss–Kronrod quadrature for complex integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Controls for the jump integrals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Momentum window; either end may be infinite.
    pub window: (f64, f64),
    /// Equal sub-panels each elementary panel is split into before refinement.
    pub base_panels: usize,
    /// Maximum number of subintervals the adaptive scheme may hold.
    pub max_intervals: usize,
    /// Points where the weight may be singular; panels are graded towards them.
    pub singularities: Vec<f64>,
    /// Extra panel boundaries, e.g. tabulation nodes.
    pub breakpoints: Vec<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            window: (f64::NEG_INFINITY, f64::INFINITY),
            base_panels: 1,
            max_intervals: 4000,
            singularities: Vec::new(),
            breakpoints: Vec::new(),
            abs_tol: 1e-8,
            rel_tol: 1e-6,
        }
    }
}

impl QuadratureSpec {
    pub fn with_window(lo: f64, hi: f64) -> Self {
        Self {
            window: (lo, hi),
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_singularity(mut self, q: f64) -> Self {
        if !self.singularities.contains(&q) {
            self.singularities.push(q);
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if lo.is_nan() || hi.is_nan() || !(hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "empty quadrature window [{lo}, {hi}]"
            )));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::InvalidParameter("tolerances must be positive".into()));
        }
        if self.base_panels == 0 || self.max_intervals == 0 {
            return Err(Error::InvalidParameter("panel counts must be positive".into()));
        }
        Ok(())
    }
}

/// Integral estimate with its error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: Complex64,
    pub error: f64,
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

fn scaled_error(raw: f64, resabs: f64, resasc: f64) -> f64 {
    let mut err = raw;
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    err
}

/// 21-point Kronrod rule with its embedded 10-point Gauss rule on `[a, b]`.
pub fn gk21<F>(f: &F, a: f64, b: f64) -> Estimate
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut fv1 = [Complex64::new(0.0, 0.0); 10];
    let mut fv2 = [Complex64::new(0.0, 0.0); 10];

    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resg = Complex64::new(0.0, 0.0);
    let mut resabs = (fc.re.abs() * WGK[10], fc.im.abs() * WGK[10]);

    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            resg += (f1 + f2) * WG[j / 2];
        }
        resabs.0 += WGK[j] * (f1.re.abs() + f2.re.abs());
        resabs.1 += WGK[j] * (f1.im.abs() + f2.im.abs());
    }

    let mean = resk * 0.5;
    let mut resasc = (
        WGK[10] * (fc.re - mean.re).abs(),
        WGK[10] * (fc.im - mean.im).abs(),
    );
    for j in 0..10 {
        resasc.0 += WGK[j] * ((fv1[j].re - mean.re).abs() + (fv2[j].re - mean.re).abs());
        resasc.1 += WGK[j] * ((fv1[j].im - mean.im).abs() + (fv2[j].im - mean.im).abs());
    }

    let h = half.abs();
    let value = resk * half;
    let raw = (resk - resg) * half;
    let error = scaled_error(raw.re.abs(), resabs.0 * h, resasc.0 * h)
        + scaled_error(raw.im.abs(), resabs.1 * h, resasc.1 * h);
    Estimate { value, error }
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error.total_cmp(&other.est.error) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive integration over a set of initial panels.
///
/// The interval with the largest error is bisected until the summed error
/// drops below `max(abs_tol, rel_tol·|I|)`.
pub fn integrate_panels<F>(
    f: &F,
    panels: &[(f64, f64)],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Estimate>
where
    F: Fn(f64) -> Complex64 + ?Sized,
{
    let mut heap = BinaryHeap::with_capacity(panels.len() * 2);
    for &(a, b) in panels {
        if b > a {
            heap.push(Piece { a, b, est: gk21(f, a, b) });
        }
    }
    if heap.is_empty() {
        return Ok(Estimate {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
        });
    }

    loop {
        let (value, error) = heap.iter().fold((Complex64::new(0.0, 0.0), 0.0), |acc, p| {
            (acc.0 + p.est.value, acc.1 + p.est.error)
        });
        let tol = abs_tol.max(rel_tol * value.norm());
        if error <= tol {
            return Ok(Estimate {
                value: ordered_sum(&heap),
                error,
            });
        }
        if !value.re.is_finite() || !value.im.is_finite() || heap.len() >= max_intervals {
            return Err(Error::QuadratureNotConverged {
                estimate: value.norm(),
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(Error::QuadratureNotConverged {
                estimate: value.norm(),
                error,
                intervals: heap.len() + 1,
            });
        }
        heap.push(Piece { a: worst.a, b: mid, est: gk21(f, worst.a, mid) });
        heap.push(Piece { a: mid, b: worst.b, est: gk21(f, mid, worst.b) });
    }
}

/// Sum in left-to-right order so the result does not depend on heap layout.
fn ordered_sum(heap: &BinaryHeap<Piece>) -> Complex64 {
    let mut pieces: Vec<&Piece> = heap.iter().collect();
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    pieces.iter().fold(Complex64::new(0.0, 0.0), |acc, p| acc + p.est.value)
}

/// Adaptive integral of a real function on a finite interval.
pub fn integrate_real<F>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let g = |x: f64| Complex64::new(f(x), 0.0);
    integrate_panels(&g, &[(a, b)], abs_tol, rel_tol, 4000).map(|e| e.value.re)
}

/// Splits `[a, b]` geometrically towards a singular endpoint.
///
/// Produces panels of width `(b − a)·2^{-k}` next to the singular end, down
/// to `2^{-depth}` of the original width.
pub fn graded_panels(a: f64, b: f64, singular_left: bool, singular_right: bool, depth: u32) -> Vec<(f64, f64)> {
    match (singular_left, singular_right) {
        (false, false) => vec![(a, b)],
        (true, true) => {
            let mid = 0.5 * (a + b);
            let mut left = graded_panels(a, mid, true, false, depth);
            left.extend(graded_panels(mid, b, false, true, depth));
            left
        }
        (true, false) => {
            let width = b - a;
            let mut cuts: Vec<f64> = (0..=depth).map(|k| a + width * 0.5f64.powi(k as i32)).collect();
            cuts.push(a);
            cuts.reverse();
            cuts.dedup();
            cuts.windows(2).map(|w| (w[0], w[1])).collect()
        }
        (false, true) => graded_panels(-b, -a, true, false, depth)
            .into_iter()
            .rev()
            .map(|(x, y)| (-y, -x))
            .collect(),
    }
}

/// Wynn's epsilon extrapolation of the limit of a sequence of partial sums.
pub fn wynn_epsilon(partial: &[f64]) -> f64 {
    let n = partial.len();
    if n < 3 {
        return partial.last().copied().unwrap_or(0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur = partial.to_vec();
    let mut best = partial[n - 1];
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for k in 0..cur.len() - 1 {
            let d = cur[k + 1] - cur[k];
            if d == 0.0 || !d.is_finite() {
                return if col % 2 == 1 { cur[k + 1] } else { best };
            }
            next.push(prev[k + 1] + 1.0 / d);
        }
        if col % 2 == 0 {
            if let Some(&v) = next.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
        prev = cur;
        cur = next;
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk21_is_exact_for_polynomials() {
        let f = |x: f64| Complex64::new(x.powi(7) - 3.0 * x * x, x.powi(3));
        let est = gk21(&f, 0.0, 2.0);
        let exact = Complex64::new(2f64.powi(8) / 8.0 - 8.0, 4.0);
        assert!((est.value - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate_real(|x| x.powf(-0.5), 0.0, 1.0, 1e-12, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn graded_panels_cover_interval() {
        let p = graded_panels(0.0, 1.0, true, false, 10);
        assert_eq!(p.first().unwrap().0, 0.0);
        assert_eq!(p.last().unwrap().1, 1.0);
        assert!(p.windows(2).all(|w| w[0].1 == w[1].0));
        let q = graded_panels(-1.0, 0.0, false, true, 10);
        assert_eq!(q.first().unwrap().0, -1.0);
        assert_eq!(q.last().unwrap().1, 0.0);
        assert!(q.windows(2).all(|w| w[0].1 == w[1].0));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 − 1/2 + 1/3 − …
        let mut sums = Vec::new();
        let mut acc = 0.0;
        for k in 1..=14 {
            acc += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            sums.push(acc);
        }
        assert!((wynn_epsilon(&sums) - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let f = |x: f64| Complex64::new(1.0 / x, 0.0);
        let r = integrate_panels(&f, &[(0.0, 1.0)], 1e-12, 1e-12, 50);
        assert!(matches!(r, Err(Error::QuadratureNotConverged { .. })));
    }
}
