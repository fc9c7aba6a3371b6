//! Jump integrals ∫dq w(q)[e^{iqs/ħ} − 1 − comp(q)] over a momentum window.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{graded_panels, integrate_panels, wynn_epsilon, Estimate, QuadratureSpec};
use crate::error::{Error, Result};

/// Depth of the geometric grading towards a singular point.
const GRADING_DEPTH: u32 = 50;
/// Half-periods of e^{iqs/ħ} kept inside the finite part before the tails start.
const TAIL_OFFSET_HALF_PERIODS: f64 = 16.0;
/// Innermost dyadic cut around the origin.
const DYADIC_INNER: f64 = 1.0 / 1024.0;
const MAX_TAIL_CYCLES: usize = 600;

/// e^{iθ} − 1 without cancellation for small θ.
#[inline]
pub(crate) fn expm1_i(theta: f64) -> Complex64 {
    let h = (0.5 * theta).sin();
    Complex64::new(-2.0 * h * h, theta.sin())
}

/// Integrates a non-negative (or signed) jump weight against the exponent kernel.
///
/// With `compensated` the kernel carries the regularizing term
/// `−(i/ħ)·q s/(1 + q²/q0²)` needed by measures that diverge at `q = 0`.
/// Infinite window ends are handled by a substituted non-oscillatory tail and
/// an epsilon-extrapolated sum over half-periods for the oscillatory part.
pub fn jump_integral<W>(
    weight: &W,
    s: f64,
    compensated: bool,
    q0: f64,
    hbar: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    W: Fn(f64) -> f64 + ?Sized,
{
    spec.validate()?;
    if compensated && !(q0 > 0.0) {
        return Err(Error::InvalidParameter(format!("q0 must be positive, got {q0}")));
    }
    if !(hbar > 0.0) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    if s == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let omega = s / hbar;
    let comp = |q: f64| {
        if compensated {
            omega * q / (1.0 + (q / q0) * (q / q0))
        } else {
            0.0
        }
    };
    let kernel = |q: f64| {
        let w = weight(q);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let k = expm1_i(omega * q) - Complex64::new(0.0, comp(q));
        k * w
    };

    let (lo, hi) = spec.window;
    let offset = TAIL_OFFSET_HALF_PERIODS * PI / omega.abs();
    let inside = |q: f64| q.is_finite() && q >= lo && q <= hi;
    let mut anchors: Vec<f64> = spec
        .singularities
        .iter()
        .chain(spec.breakpoints.iter())
        .copied()
        .filter(|&q| inside(q))
        .collect();
    if lo.is_finite() {
        anchors.push(lo);
    }
    if hi.is_finite() {
        anchors.push(hi);
    }
    let anchor_min = anchors.iter().copied().fold(f64::INFINITY, f64::min);
    let anchor_max = anchors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (anchor_min, anchor_max) = if anchors.is_empty() {
        (0.0, 0.0)
    } else {
        (anchor_min, anchor_max)
    };
    let lo_f = if lo.is_finite() { lo } else { anchor_min - offset };
    let hi_f = if hi.is_finite() { hi } else { anchor_max + offset };

    let mut cuts: Vec<f64> = anchors.clone();
    cuts.push(lo_f);
    cuts.push(hi_f);
    // dyadic cuts around the origin so that features of any width near q = 0
    // are seen by the first rule applied to them
    if lo_f < 0.0 && hi_f > 0.0 {
        cuts.push(0.0);
    }
    let extent = lo_f.abs().max(hi_f.abs());
    let mut r = DYADIC_INNER;
    while r < extent {
        cuts.push(r);
        cuts.push(-r);
        r *= 2.0;
    }
    cuts.retain(|&q| q >= lo_f && q <= hi_f);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let singular = |q: f64| spec.singularities.iter().any(|&x| x == q);
    let mut panels = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let step = (b - a) / spec.base_panels as f64;
        for k in 0..spec.base_panels {
            let pa = a + step * k as f64;
            let pb = if k + 1 == spec.base_panels { b } else { a + step * (k + 1) as f64 };
            let sl = k == 0 && singular(a);
            let sr = k + 1 == spec.base_panels && singular(b);
            panels.extend(graded_panels(pa, pb, sl, sr, GRADING_DEPTH));
        }
    }

    let finite = integrate_panels(&kernel, &panels, spec.abs_tol, spec.rel_tol, spec.max_intervals)?;
    let mut total = finite.value;

    let tail_tol = 0.01 * spec.abs_tol.max(spec.rel_tol * finite.value.norm());
    if hi.is_infinite() {
        total += semi_infinite_tail(weight, omega, &comp, hi_f, tail_tol, spec)?;
    }
    if lo.is_infinite() {
        let mirrored = |p: f64| weight(-p);
        let comp_m = |p: f64| comp(-p);
        // ∫_{-∞}^{lo_f} g(q) dq = ∫_{-lo_f}^{∞} g(-p) dp
        total += semi_infinite_tail(&mirrored, -omega, &comp_m, -lo_f, tail_tol, spec)?;
    }
    Ok(total)
}

/// ∫_{start}^{∞} w(q)[e^{iωq} − 1 − i·comp(q)] dq.
fn semi_infinite_tail<W, C>(
    weight: &W,
    omega: f64,
    comp: &C,
    start: f64,
    tol: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    W: Fn(f64) -> f64 + ?Sized,
    C: Fn(f64) -> f64,
{
    // non-oscillatory part, q = start + L(1 − t)/t
    let scale = PI / omega.abs();
    let flat = |t: f64| {
        let q = start + scale * (1.0 - t) / t;
        let jac = scale / (t * t);
        let w = weight(q);
        if w == 0.0 || !jac.is_finite() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(-1.0, -comp(q)) * (w * jac)
    };
    let flat_part = integrate_panels(&flat, &[(0.0, 1.0)], tol, spec.rel_tol * 1e-2, spec.max_intervals)?;

    let osc = |q: f64| {
        let w = weight(q);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(w, omega * q)
    };
    let cycle_tol = tol * 1e-2;
    let mut re_sums = Vec::new();
    let mut im_sums = Vec::new();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut last: Option<Complex64> = None;
    let mut settled = 0;
    let mut negligible = 0;
    for k in 0..MAX_TAIL_CYCLES {
        let a = start + scale * k as f64;
        let Estimate { value, .. } =
            integrate_panels(&osc, &[(a, a + scale)], cycle_tol, 1e-10, spec.max_intervals)?;
        acc += value;
        re_sums.push(acc.re);
        im_sums.push(acc.im);
        if value.norm() <= cycle_tol {
            negligible += 1;
            if negligible >= 3 {
                return Ok(flat_part.value + acc);
            }
        } else {
            negligible = 0;
        }
        if k >= 4 {
            let window = 16.min(re_sums.len());
            let from = re_sums.len() - window;
            let extrap = Complex64::new(
                wynn_epsilon(&re_sums[from..]),
                wynn_epsilon(&im_sums[from..]),
            );
            if let Some(prev) = last {
                if (extrap - prev).norm() <= tol {
                    settled += 1;
                    if settled >= 2 {
                        return Ok(flat_part.value + extrap);
                    }
                } else {
                    settled = 0;
                }
            }
            last = Some(extrap);
        }
    }
    Err(Error::QuadratureNotConverged {
        estimate: acc.norm(),
        error: f64::NAN,
        intervals: MAX_TAIL_CYCLES,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(mu: f64, sigma: f64) -> impl Fn(f64) -> f64 {
        move |q: f64| {
            let z = (q - mu) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * PI).sqrt())
        }
    }

    #[test]
    fn zero_weight_gives_zero() {
        let spec = QuadratureSpec::with_window(-5.0, 5.0);
        let v = jump_integral(&|_q: f64| 0.0, 1.3, false, 1.0, 1.0, &spec).unwrap();
        assert_eq!(v, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn gaussian_weight_matches_closed_form() {
        let rate = 2.5;
        let g = gaussian(0.3, 0.8);
        let w = |q: f64| rate * g(q);
        let spec = QuadratureSpec::with_window(-12.0, 12.0);
        for &s in &[-3.0, -0.5, 0.25, 1.0, 4.0] {
            let v = jump_integral(&w, s, false, 1.0, 1.0, &spec).unwrap();
            let cf = Complex64::new(-0.5 * 0.64 * s * s, 0.3 * s).exp();
            let exact = (cf - 1.0) * rate;
            assert!((v - exact).norm() < 1e-8, "s={s}: {v} vs {exact}");
        }
    }

    #[test]
    fn infinite_window_tails_match_finite_window() {
        let g = gaussian(0.0, 1.0);
        let a = jump_integral(&g, 1.7, false, 1.0, 1.0, &QuadratureSpec::default()).unwrap();
        let b = jump_integral(&g, 1.7, false, 1.0, 1.0, &QuadratureSpec::with_window(-15.0, 15.0)).unwrap();
        assert!((a - b).norm() < 1e-9, "{a} vs {b}");
    }

    #[test]
    fn power_law_scaling() {
        // |ω|² = |q|^{-2.5}: Ψ(2s)/Ψ(s) = 2^{1.5}
        let w = |q: f64| q.abs().powf(-2.5);
        let spec = QuadratureSpec::default().with_singularity(0.0);
        let v1 = jump_integral(&w, 0.7, true, 1.0, 1.0, &spec).unwrap();
        let v2 = jump_integral(&w, 1.4, true, 1.0, 1.0, &spec).unwrap();
        assert!(v1.re < 0.0);
        assert!(v1.im.abs() < 1e-9 * v1.re.abs());
        assert!((v2.re / v1.re - 2f64.powf(1.5)).abs() < 1e-4);
    }
}
