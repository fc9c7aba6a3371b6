//! Piecewise-linear tabulations over momentum, zero outside the nodes.

use std::io::BufRead;
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// sin(x)/x.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// (sin x − x cos x)/x², odd, ~x/3 near zero.
pub(crate) fn bessel_j1(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut term = x / 3.0;
        let mut sum = term;
        for k in 2..=8 {
            let k = k as f64;
            // ratio of consecutive series terms 2k x^{2k−1}/(2k+1)!
            term *= -x2 * k / ((k - 1.0) * (2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum
    } else {
        (x.sin() - x * x.cos()) / (x * x)
    }
}

/// ∫_a^b f(q) e^{iωq} dq for f linear from `fa` to `fb`.
#[inline]
pub(crate) fn segment_transform(a: f64, b: f64, fa: f64, fb: f64, omega: f64) -> Complex64 {
    let h = b - a;
    let x = 0.5 * omega * h;
    let c = 0.5 * (a + b);
    let body = Complex64::new(0.5 * (fa + fb) * sinc(x), 0.5 * (fb - fa) * bessel_j1(x));
    Complex64::from_polar(h, omega * c) * body
}

/// Non-negative values on strictly increasing nodes, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulation {
    q: Vec<f64>,
    p: Vec<f64>,
    /// `(q_min, Δq)` when the nodes are evenly spaced.
    #[serde(skip)]
    uniform: Option<(f64, f64)>,
}

impl Tabulation {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        if q.len() != p.len() {
            return Err(Error::InvalidParameter(format!(
                "{} nodes but {} values",
                q.len(),
                p.len()
            )));
        }
        if q.len() < 2 {
            return Err(Error::InvalidParameter("tabulation needs at least two nodes".into()));
        }
        if q.iter().chain(p.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonIntegrableKernel("non-finite tabulated value".into()));
        }
        if q.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("nodes must be strictly increasing".into()));
        }
        if let Some(v) = p.iter().find(|&&v| v < 0.0) {
            return Err(Error::InvalidParameter(format!("negative tabulated value {v}")));
        }
        let n = q.len();
        let h = (q[n - 1] - q[0]) / (n - 1) as f64;
        let even = q
            .iter()
            .enumerate()
            .all(|(j, &x)| (x - (q[0] + h * j as f64)).abs() <= 1e-12 * (q[0].abs() + q[n - 1].abs()));
        let uniform = even.then_some((q[0], h));
        Ok(Self { q, p, uniform })
    }

    /// Values on `q_min + jΔq`.
    pub fn uniform(q_min: f64, dq: f64, p: Vec<f64>) -> Result<Self> {
        if !(dq > 0.0) || !q_min.is_finite() {
            return Err(Error::InvalidParameter(format!("bad uniform grid q_min={q_min}, dq={dq}")));
        }
        let q = (0..p.len()).map(|j| q_min + dq * j as f64).collect();
        let mut t = Self::new(q, p)?;
        t.uniform = Some((q_min, dq));
        Ok(t)
    }

    /// Samples `f` at the given nodes.
    pub fn from_fn(q: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let p = q.iter().map(|&x| f(x)).collect();
        Self::new(q, p)
    }

    /// Reads `q value` pairs separated by whitespace or a comma; lines starting with '#' are skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut q = Vec::new();
        let mut p = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut cols = trimmed.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty());
            let mut next = |what: &str| -> Result<f64> {
                let tok = cols.next().ok_or_else(|| Error::Parse {
                    line: i + 1,
                    message: format!("missing {what} column"),
                })?;
                tok.parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("cannot parse '{tok}' as a number"),
                })
            };
            let x = next("q")?;
            let v = next("value")?;
            if cols.next().is_some() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: "expected exactly two columns".into(),
                });
            }
            q.push(x);
            p.push(v);
        }
        Self::new(q, p)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read(std::io::BufReader::new(file))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.q
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn uniform_spacing(&self) -> Option<(f64, f64)> {
        self.uniform
    }

    pub fn support(&self) -> (f64, f64) {
        (self.q[0], self.q[self.q.len() - 1])
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            q: self.q.clone(),
            p: self.p.iter().map(|v| v * c).collect(),
            uniform: self.uniform,
        }
    }

    /// Interpolated value; zero outside the node range.
    pub fn value_at(&self, x: f64) -> f64 {
        let n = self.q.len();
        if !(x >= self.q[0] && x <= self.q[n - 1]) {
            return 0.0;
        }
        let i = match self.uniform {
            Some((q0, h)) => (((x - q0) / h).floor() as usize).min(n - 2),
            None => self.q.partition_point(|&v| v <= x).clamp(1, n - 1) - 1,
        };
        let (a, b) = (self.q[i], self.q[i + 1]);
        let t = (x - a) / (b - a);
        self.p[i] * (1.0 - t) + self.p[i + 1] * t
    }

    fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.q.len() - 1).map(move |i| (self.q[i], self.q[i + 1], self.p[i], self.p[i + 1]))
    }

    /// Exact integral of the interpolant.
    pub fn integral(&self) -> f64 {
        self.segments().map(|(a, b, fa, fb)| 0.5 * (b - a) * (fa + fb)).sum()
    }

    /// Exact integral of the interpolant over `[lo, hi]`.
    pub fn integral_between(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        self.segments()
            .map(|(a, b, _, _)| {
                let (l, r) = (a.max(lo), b.min(hi));
                if r > l {
                    0.5 * (r - l) * (self.value_at(l) + self.value_at(r))
                } else {
                    0.0
                }
            })
            .sum()
    }

    /// Exact ∫q f(q) dq of the interpolant.
    pub fn first_moment(&self) -> f64 {
        self.segments()
            .map(|(a, b, fa, fb)| (b - a) / 6.0 * (fa * (2.0 * a + b) + fb * (a + 2.0 * b)))
            .sum()
    }

    /// Exact ∫q² f(q) dq of the interpolant.
    pub fn second_moment(&self) -> f64 {
        self.segments()
            .map(|(a, b, fa, fb)| {
                (b - a) / 12.0
                    * (fa * (3.0 * a * a + 2.0 * a * b + b * b) + fb * (a * a + 2.0 * a * b + 3.0 * b * b))
            })
            .sum()
    }

    /// Exact ∫f(q) e^{iωq} dq of the interpolant.
    pub fn transform(&self, omega: f64) -> Complex64 {
        if omega == 0.0 {
            return Complex64::new(self.integral(), 0.0);
        }
        if omega < 0.0 {
            return self.transform(-omega).conj();
        }
        match self.uniform {
            Some((q0, h)) => uniform_transform(q0, h, &self.p, omega),
            None => self
                .segments()
                .map(|(a, b, fa, fb)| segment_transform(a, b, fa, fb, omega))
                .sum(),
        }
    }
}

/// Transform of the interpolant on an even grid: hat functions plus end corrections.
pub(crate) fn uniform_transform(q0: f64, h: f64, p: &[f64], omega: f64) -> Complex64 {
    let n = p.len();
    let x = 0.5 * omega * h;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, &v) in p.iter().enumerate() {
        if v != 0.0 {
            let (s, c) = (omega * (q0 + h * j as f64)).sin_cos();
            acc += Complex64::new(v * c, v * s);
        }
    }
    let sx = sinc(x);
    let hats = acc * (h * sx * sx);
    hats - end_corrections(q0, q0 + h * (n - 1) as f64, h, p[0], p[n - 1], omega)
}

/// Half-hats that a hat expansion places outside the first and last node.
pub(crate) fn end_corrections(q_first: f64, q_last: f64, h: f64, p_first: f64, p_last: f64, omega: f64) -> Complex64 {
    let x = 0.5 * omega * h;
    let (sx, jx) = (sinc(x), bessel_j1(x));
    let left = Complex64::from_polar(h, omega * (q_first - 0.5 * h)) * Complex64::new(0.5 * p_first * sx, 0.5 * p_first * jx);
    let right = Complex64::from_polar(h, omega * (q_last + 0.5 * h)) * Complex64::new(0.5 * p_last * sx, -0.5 * p_last * jx);
    left + right
}

#[cfg(test)]
mod tests {
    use super::*;

    fn box_tab() -> Tabulation {
        Tabulation::new(vec![0.0, 0.5, 1.0], vec![1.0, 1.0, 1.0]).unwrap()
    }

    #[test]
    fn j1_series_and_closed_form_agree_at_switch() {
        let x: f64 = 0.5;
        let closed = (x.sin() - x * x.cos()) / (x * x);
        assert!((bessel_j1(0.499_999_999) - closed).abs() < 1e-9);
        let y: f64 = 0.4;
        assert!((bessel_j1(y) - (y.sin() - y * y.cos()) / (y * y)).abs() < 1e-13);
        assert!((bessel_j1(1e-3) - (1e-3 / 3.0 - 1e-9 / 30.0)).abs() < 1e-17);
    }

    #[test]
    fn box_moments_and_transform() {
        let t = box_tab();
        assert_eq!(t.integral(), 1.0);
        assert!((t.first_moment() - 0.5).abs() < 1e-15);
        assert!((t.second_moment() - 1.0 / 3.0).abs() < 1e-15);
        for &w in &[0.3, 2.0, 17.0] {
            let exact = Complex64::from_polar(1.0, 0.5 * w) * sinc(0.5 * w);
            assert!((t.transform(w) - exact).norm() < 1e-14);
            assert!((t.transform(-w) - exact.conj()).norm() < 1e-14);
        }
    }

    #[test]
    fn uniform_fast_path_matches_segment_sum() {
        let p: Vec<f64> = (0..40).map(|j| ((j as f64) * 0.37).sin().abs() + 0.1).collect();
        let t = Tabulation::uniform(-1.3, 0.07, p.clone()).unwrap();
        let generic = Tabulation { uniform: None, ..t.clone() };
        for &w in &[0.01, 1.0, 13.0, 300.0] {
            assert!((t.transform(w) - generic.transform(w)).norm() < 1e-12);
        }
    }

    #[test]
    fn triangle_interpolation_and_partial_integral() {
        let t = Tabulation::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(t.value_at(0.5), 0.5);
        assert_eq!(t.value_at(-0.1), 0.0);
        assert!((t.integral_between(0.0, 1.0) - 0.5).abs() < 1e-15);
        assert!((t.integral_between(0.5, 1.5) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn reads_two_column_text() {
        let text = "# q value\n0 1\n\n0.5   2\n1\t3\n";
        let t = Tabulation::read(text.as_bytes()).unwrap();
        assert_eq!(t.nodes(), &[0.0, 0.5, 1.0]);
        assert_eq!(t.values(), &[1.0, 2.0, 3.0]);
        let err = Tabulation::read("0 1\n1 x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        assert!(Tabulation::read("0 1 2\n1 1 1\n".as_bytes()).is_err());
    }

    #[test]
    fn rejects_negative_values() {
        assert!(Tabulation::new(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }
}
