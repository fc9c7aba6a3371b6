//! Monte Carlo realizations of the jump processes and empirical CFs.
//!
//! Samples are generated in fixed-size chunks, each with its own ChaCha
//! stream selected by chunk index, so the output depends only on the seed and
//! never on how many worker threads run.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rand::distributions::{Distribution, Open01};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::SeparationGrid;
use crate::models::{mandel_pd, MomentumPd, StableParams, Tabulation};

const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Process {
    /// Poisson(Λt) events, each an independent draw from `pd`.
    CompoundPoisson { rate: f64, pd: MomentumPd },
    /// Normal with mean −aħt and variance Dħ²t.
    Gaussian { a: f64, d: f64 },
    /// Symmetric stable with CF e^{−Kt|s/x0|^α}.
    Stable(StableParams),
    /// Exactly `n` independent draws from `pd`, ignoring the horizon.
    FixedKicks { n: u64, pd: MomentumPd },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    pub sample_count: usize,
    pub process: Process,
    pub horizon: f64,
    pub hbar: f64,
}

impl SamplerConfig {
    pub fn new(process: Process, horizon: f64, sample_count: usize, seed: u64) -> Self {
        Self {
            seed,
            sample_count,
            process,
            horizon,
            hbar: 1.0,
        }
    }
}

/// Single-kick sampler built once per run.
enum KickSampler {
    Point(f64),
    Normal { mean: f64, std: f64 },
    Uniform { lo: f64, hi: f64 },
    Table { q: Vec<f64>, p: Vec<f64>, cdf: Vec<f64> },
}

impl KickSampler {
    fn new(pd: &MomentumPd) -> Result<Self> {
        Ok(match pd {
            MomentumPd::PointMass { at } => Self::Point(*at),
            MomentumPd::Gaussian { mean, std } => Self::Normal { mean: *mean, std: *std },
            MomentumPd::Uniform { lo, hi } => Self::Uniform { lo: *lo, hi: *hi },
            MomentumPd::Tabulated(t) => Self::table(t),
            MomentumPd::Mandel(m) => Self::table(mandel_pd(m, &m.default_pair())?.as_tabulation().expect("tabulated")),
        })
    }

    fn table(t: &Tabulation) -> Self {
        let (q, p) = (t.nodes().to_vec(), t.values().to_vec());
        let mut cdf = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 0..q.len() - 1 {
            acc += 0.5 * (q[i + 1] - q[i]) * (p[i] + p[i + 1]);
            cdf.push(acc);
        }
        Self::Table { q, p, cdf }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Point(q) => *q,
            Self::Normal { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            Self::Table { q, p, cdf } => {
                let target = rng.gen::<f64>() * cdf[cdf.len() - 1];
                let i = cdf.partition_point(|&c| c <= target).clamp(1, cdf.len() - 1) - 1;
                // invert the quadratic CDF of the linear piece [q_i, q_{i+1}]
                let h = q[i + 1] - q[i];
                let m = target - cdf[i];
                let (fa, fb) = (p[i], p[i + 1]);
                let slope = (fb - fa) / h;
                let disc = (fa * fa + 2.0 * slope * m).max(0.0);
                let denom = fa + disc.sqrt();
                let dx = if denom > 0.0 { 2.0 * m / denom } else { 0.0 };
                q[i] + dx.clamp(0.0, h)
            }
        }
    }
}

enum Draw {
    Compound { poisson: Option<Poisson<f64>>, kick: KickSampler },
    Fixed { n: u64, kick: KickSampler },
    Normal { mean: f64, std: f64 },
    Stable { alpha: f64, scale: f64 },
}

impl Draw {
    fn new(cfg: &SamplerConfig) -> Result<Self> {
        let t = cfg.horizon;
        if !(t >= 0.0) {
            return Err(Error::NegativeTime(t));
        }
        let hbar = cfg.hbar;
        Ok(match &cfg.process {
            Process::CompoundPoisson { rate, pd } => {
                if !(*rate >= 0.0) || !rate.is_finite() {
                    return Err(Error::InvalidParameter(format!("rate must be non-negative, got {rate}")));
                }
                let mean = rate * t;
                let poisson = if mean > 0.0 {
                    Some(Poisson::new(mean).map_err(|e| Error::InvalidParameter(e.to_string()))?)
                } else {
                    None
                };
                Self::Compound { poisson, kick: KickSampler::new(pd)? }
            }
            Process::FixedKicks { n, pd } => Self::Fixed { n: *n, kick: KickSampler::new(pd)? },
            Process::Gaussian { a, d } => {
                if !(*d >= 0.0) {
                    return Err(Error::InvalidParameter(format!("diffusion must be non-negative, got {d}")));
                }
                Self::Normal {
                    mean: -a * hbar * t,
                    std: (d * t).sqrt() * hbar,
                }
            }
            Process::Stable(p) => {
                let p = StableParams::new(p.alpha, p.k, p.x0)?;
                Self::Stable {
                    alpha: p.alpha,
                    scale: hbar * (p.k * t).powf(1.0 / p.alpha) / p.x0,
                }
            }
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Compound { poisson, kick } => {
                let n = poisson.as_ref().map_or(0, |d| d.sample(rng) as u64);
                (0..n).map(|_| kick.draw(rng)).sum()
            }
            Self::Fixed { n, kick } => (0..*n).map(|_| kick.draw(rng)).sum(),
            Self::Normal { mean, std } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + std * z
            }
            Self::Stable { alpha, scale } => scale * standard_stable(*alpha, rng),
        }
    }
}

/// Chambers–Mallows–Stuck draw with CF e^{−|s|^α}.
fn standard_stable<R: Rng>(alpha: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    let v = PI * (u - 0.5);
    let w: f64 = rng.sample(Exp1);
    if alpha == 1.0 {
        return v.tan();
    }
    let tail = (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha);
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * tail
}

/// Total momentum transfer per sample.
pub fn sample_total_transfer(cfg: &SamplerConfig) -> Result<Vec<f64>> {
    if cfg.sample_count == 0 {
        return Err(Error::InvalidParameter("sample_count must be at least 1".into()));
    }
    let draw = Draw::new(cfg)?;
    let mut out = vec![0.0; cfg.sample_count];
    out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, chunk)| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(c as u64);
        for x in chunk.iter_mut() {
            *x = draw.draw(&mut rng);
        }
    });
    Ok(out)
}

/// Sums of exactly `n` kicks from `pd`.
pub fn sample_fixed_kicks(pd: &MomentumPd, n: u64, sample_count: usize, seed: u64) -> Result<Vec<f64>> {
    sample_total_transfer(&SamplerConfig::new(
        Process::FixedKicks { n, pd: pd.clone() },
        0.0,
        sample_count,
        seed,
    ))
}

/// Sample mean of e^{iQs/ħ} with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalCF {
    pub grid: SeparationGrid,
    pub values: Vec<Complex64>,
    /// √((Var cos + Var sin)/N); infinite for a single sample.
    pub std_errors: Vec<f64>,
    pub sample_count: usize,
}

impl EmpiricalCF {
    /// |Φ̂ − Φ| ≤ k·SE per point.
    pub fn within(&self, analytic: &[Complex64], k: f64) -> Vec<bool> {
        self.values
            .iter()
            .zip(analytic)
            .zip(&self.std_errors)
            .map(|((v, a), se)| (v - a).norm() <= k * se)
            .collect()
    }

    pub fn pass_rate(&self, analytic: &[Complex64], k: f64) -> f64 {
        let w = self.within(analytic, k);
        w.iter().filter(|b| **b).count() as f64 / w.len() as f64
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "s,re,im,se")?;
        for ((s, v), se) in self.grid.points().iter().zip(&self.values).zip(&self.std_errors) {
            writeln!(out, "{s:.16e},{:.16e},{:.16e},{se:.16e}", v.re, v.im)?;
        }
        Ok(())
    }
}

/// Φ̂(s) = mean of e^{iQ_k s/ħ}; points are processed in parallel, samples in order.
pub fn empirical_cf(samples: &[f64], grid: &SeparationGrid, hbar: f64) -> Result<EmpiricalCF> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let values: Vec<Complex64> = grid
        .points()
        .par_iter()
        .map(|&s| {
            if s == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let w = s / hbar;
            let (mut c, mut si) = (0.0, 0.0);
            for &q in samples {
                let (a, b) = (w * q).sin_cos();
                c += b;
                si += a;
            }
            Complex64::new(c / n as f64, si / n as f64)
        })
        .collect();
    // cos² + sin² = 1 gives Var cos + Var sin = N(1 − |Φ̂|²)/(N − 1)
    let std_errors = values
        .iter()
        .map(|v| {
            if n == 1 {
                f64::INFINITY
            } else {
                ((1.0 - v.norm_sqr()).max(0.0) / (n - 1) as f64).sqrt()
            }
        })
        .collect();
    Ok(EmpiricalCF {
        grid: grid.clone(),
        values,
        std_errors,
        sample_count: n,
    })
}

/// Writes one sample per line under a `q` header.
pub fn write_samples_csv<W: Write>(samples: &[f64], mut out: W) -> std::io::Result<()> {
    writeln!(out, "q")?;
    for q in samples {
        writeln!(out, "{q:.16e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_inversion_hits_the_cdf() {
        // density 2q on [0,1]: CDF q², so u maps to √u
        let t = Tabulation::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        let KickSampler::Table { q, p, cdf } = KickSampler::table(&t) else { unreachable!() };
        let sampler = KickSampler::Table { q, p, cdf };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let mut probe = rng.clone();
            let u: f64 = probe.gen();
            let x = sampler.draw(&mut rng);
            assert!((x - u.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_horizon_gives_zero_transfer() {
        let cfg = SamplerConfig::new(
            Process::CompoundPoisson { rate: 3.0, pd: MomentumPd::point_mass(1.0) },
            0.0,
            1000,
            5,
        );
        assert!(sample_total_transfer(&cfg).unwrap().iter().all(|q| *q == 0.0));
    }

    #[test]
    fn single_sample_has_infinite_error() {
        let grid = SeparationGrid::uniform(-1.0, 1.0, 3).unwrap();
        let e = empirical_cf(&[0.3], &grid, 1.0).unwrap();
        assert!(e.std_errors.iter().all(|s| s.is_infinite()));
        assert!(empirical_cf(&[], &grid, 1.0).is_err());
    }

    #[test]
    fn zero_samples_give_unit_cf() {
        let grid = SeparationGrid::uniform(-4.0, 4.0, 9).unwrap();
        let e = empirical_cf(&[0.0; 10], &grid, 1.0).unwrap();
        assert!(e.values.iter().all(|v| *v == Complex64::new(1.0, 0.0)));
        assert!(e.std_errors.iter().all(|s| *s == 0.0));
    }

    #[test]
    fn bad_configs_are_rejected() {
        let pd = MomentumPd::point_mass(1.0);
        let neg = SamplerConfig::new(Process::CompoundPoisson { rate: 1.0, pd: pd.clone() }, -1.0, 10, 0);
        assert!(matches!(sample_total_transfer(&neg), Err(Error::NegativeTime(_))));
        let empty = SamplerConfig::new(Process::CompoundPoisson { rate: 1.0, pd }, 1.0, 0, 0);
        assert!(sample_total_transfer(&empty).is_err());
    }
}
