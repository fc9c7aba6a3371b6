//! Compound-Poisson exponents, moments and the second-order Gaussian limit.

use super::pd::MomentumPd;
use super::tabulation::Tabulation;
use crate::error::{Error, Result};
use crate::levy::CharacteristicExponent;

/// Tail power-law exponents at or below this make ⟨q²⟩ infinite.
const SECOND_MOMENT_EXPONENT: f64 = 3.0;

/// Ψ(s) = Λ(Φ_pd(s) − 1).
pub fn compound_poisson_exponent(rate: f64, pd: &MomentumPd, hbar: f64) -> Result<CharacteristicExponent> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("rate must be non-negative, got {rate}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    if let MomentumPd::Tabulated(t) = pd {
        let mass = t.integral();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!("density has mass {mass}")));
        }
    }
    Ok(CharacteristicExponent::compound_poisson(rate, pd.clone(), hbar))
}

/// (⟨q⟩, ⟨q²⟩).
///
/// Closed forms return exact values. For tabulations the interpolant's
/// moments are returned unless a power-law fit over the last decade of the
/// grid points to a tail too heavy for a finite second moment.
pub fn pd_moments(pd: &MomentumPd) -> Result<(f64, f64)> {
    Ok(match pd {
        MomentumPd::Tabulated(t) => {
            heavy_tail_check(t)?;
            (t.first_moment() / t.integral(), t.second_moment() / t.integral())
        }
        MomentumPd::Gaussian { mean, std } => (*mean, mean * mean + std * std),
        MomentumPd::Uniform { lo, hi } => (0.5 * (lo + hi), (lo * lo + lo * hi + hi * hi) / 3.0),
        MomentumPd::PointMass { at } => (*at, at * at),
        MomentumPd::Mandel(m) => {
            let scale = m.hbar * m.k0;
            (scale, 1.4 * scale * scale)
        }
    })
}

/// Fits p ∝ |q|^{−β} on each side's last decade and errors when the tail is
/// monotone, non-negligible and has β ≤ 3.
fn heavy_tail_check(t: &Tabulation) -> Result<()> {
    let (q, p) = (t.nodes(), t.values());
    let total2 = t.second_moment().abs().max(f64::MIN_POSITIVE);
    for sign in [1.0, -1.0] {
        let edge = if sign > 0.0 { q[q.len() - 1] } else { -q[0] };
        if !(edge > 0.0) {
            continue;
        }
        let mut tail: Vec<(f64, f64)> = q
            .iter()
            .zip(p)
            .map(|(&x, &v)| (sign * x, v))
            .filter(|&(x, _)| x >= 0.1 * edge && x > 0.0)
            .collect();
        tail.sort_by(|a, b| a.0.total_cmp(&b.0));
        if tail.len() < 4 || tail.iter().any(|&(_, v)| !(v > 0.0)) {
            continue;
        }
        if tail.windows(2).any(|w| w[1].1 > w[0].1) {
            continue;
        }
        let n = tail.len() as f64;
        let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
        for &(x, v) in &tail {
            let (lx, ly) = (x.ln(), v.ln());
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        let beta = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
        let lo = tail[0].0;
        let contribution = if sign > 0.0 {
            second_moment_between(t, lo, edge)
        } else {
            second_moment_between(t, -edge, -lo)
        };
        if beta <= SECOND_MOMENT_EXPONENT && contribution > 1e-6 * total2 {
            return Err(Error::InfiniteMoment(format!(
                "tail decays like |q|^-{beta:.3} over the last decade of the grid"
            )));
        }
    }
    Ok(())
}

fn second_moment_between(t: &Tabulation, lo: f64, hi: f64) -> f64 {
    let (q, p) = (t.nodes(), t.values());
    q.windows(2)
        .zip(p.windows(2))
        .filter(|(x, _)| x[0] >= lo && x[1] <= hi)
        .map(|(x, v)| {
            let (a, b) = (x[0], x[1]);
            (b - a) / 12.0 * (v[0] * (3.0 * a * a + 2.0 * a * b + b * b) + v[1] * (a * a + 2.0 * a * b + 3.0 * b * b))
        })
        .sum()
}

/// Ψ_G(s) = Λ(i⟨q⟩s/ħ − ⟨q²⟩s²/(2ħ²)), i.e. drift a = −Λ⟨q⟩/ħ and
/// diffusion D = Λ⟨q²⟩/ħ².
pub fn gaussian_limit(rate: f64, pd: &MomentumPd, hbar: f64) -> Result<CharacteristicExponent> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("rate must be non-negative, got {rate}")));
    }
    let (m1, m2) = pd_moments(pd)?;
    Ok(CharacteristicExponent::gaussian(-rate * m1 / hbar, rate * m2 / (hbar * hbar))
        .with_hbar(hbar)
        .with_label("gaussian_limit"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::MandelParams;
    use num_complex::Complex64;

    #[test]
    fn uniform_moments() {
        let (m1, m2) = pd_moments(&MomentumPd::uniform(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(m1, 0.5);
        assert!((m2 - 1.0 / 3.0).abs() < 1e-16);
        let t = Tabulation::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let (t1, t2) = pd_moments(&MomentumPd::tabulated(t).unwrap()).unwrap();
        assert_eq!((t1, t2), (0.5, 1.0 / 3.0));
    }

    #[test]
    fn point_mass_limit_vanishes() {
        let psi = gaussian_limit(3.0, &MomentumPd::point_mass(0.0), 1.0).unwrap();
        assert_eq!(psi.eval(1.7).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn mandel_limit_coefficients() {
        let pd = MomentumPd::mandel(MandelParams::new(2.0).unwrap());
        let psi = gaussian_limit(1.5, &pd, 1.0).unwrap();
        let s: f64 = 0.3;
        let expected = Complex64::new(-0.7 * 4.0 * s * s, 2.0 * s) * 1.5;
        assert!((psi.eval(s).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn heavy_tail_is_detected() {
        let q: Vec<f64> = (0..=4000).map(|k| -1000.0 + 0.5 * k as f64).collect();
        let cauchy = Tabulation::from_fn(q.clone(), |x| 1.0 / (1.0 + x * x)).unwrap();
        assert!(matches!(
            pd_moments(&MomentumPd::tabulated(cauchy).unwrap()),
            Err(Error::InfiniteMoment(_))
        ));
        let gauss = Tabulation::from_fn(q, |x| (-0.5 * x * x / 1e4).exp()).unwrap();
        assert!(pd_moments(&MomentumPd::tabulated(gauss).unwrap()).is_ok());
    }

    #[test]
    fn negative_rate_rejected() {
        assert!(compound_poisson_exponent(-1.0, &MomentumPd::point_mass(1.0), 1.0).is_err());
    }
}
