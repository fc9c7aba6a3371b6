//! Characteristic exponents Ψ(s) and decoherence factors Φ(t,s) = e^{tΨ(s)}.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::condition::{require, Condition};
use super::triplet::{JumpWeight, LevyTriplet};
use crate::error::{Error, Result};
use crate::grid::SeparationGrid;
use crate::models::MomentumPd;
use crate::spectral::jump::jump_integral;
use crate::spectral::quadrature::integrate_real;
use crate::spectral::QuadratureSpec;

/// Which pieces of the generator contribute.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ActiveTerms {
    pub drift: bool,
    pub diffusion: bool,
    /// ∫|λ|²(e^{iqs/ħ} − 1)
    pub poisson: bool,
    /// 2∫Re(ωλ*)(e^{iqs/ħ} − 1)
    pub cross: bool,
    /// ∫|ω|²(e^{iqs/ħ} − 1 − compensator)
    pub compensated: bool,
}

#[derive(Debug, Clone)]
enum Term {
    Drift(f64),
    Diffusion(f64),
    /// −K|s/x0|^α
    Stable { k: f64, alpha: f64, x0: f64 },
    /// Λ(Φ_pd(s) − 1)
    CompoundPoisson { rate: f64, pd: MomentumPd },
    /// Tabulated intensity, transformed exactly; `drift_coeff` multiplies −iωs.
    TabulatedJump {
        weight: JumpWeight,
        mass: f64,
        drift_coeff: f64,
    },
    /// Weight integrated by adaptive quadrature.
    QuadratureJump {
        weight: JumpWeight,
        compensated: bool,
        q0: f64,
        spec: QuadratureSpec,
    },
    /// 2Re(ωλ*) integrated by adaptive quadrature.
    Cross {
        lambda: JumpWeight,
        omega: JumpWeight,
        spec: QuadratureSpec,
    },
}

/// Evaluatable Ψ(s).
///
/// Values at negative separations are taken as conjugates of the values at
/// |s|, which makes Ψ(−s) = conj Ψ(s) exact whatever the evaluation route.
#[derive(Debug, Clone)]
pub struct CharacteristicExponent {
    terms: Vec<Term>,
    hbar: f64,
    active: ActiveTerms,
    numeric: bool,
    label: String,
}

impl CharacteristicExponent {
    fn new(label: impl Into<String>, hbar: f64) -> Self {
        Self {
            terms: Vec::new(),
            hbar,
            active: ActiveTerms::default(),
            numeric: false,
            label: label.into(),
        }
    }

    /// Ψ(s) = −ias − Ds²/2.
    pub fn gaussian(drift_a: f64, diffusion_d: f64) -> Self {
        let mut e = Self::new("gaussian", 1.0);
        e.push_gaussian(drift_a, diffusion_d);
        e
    }

    /// Ψ(s) = −K|s/x0|^α; K, x0 and α are not checked here.
    pub(crate) fn stable(k: f64, alpha: f64, x0: f64) -> Self {
        let mut e = Self::new("stable", 1.0);
        e.terms.push(Term::Stable { k, alpha, x0 });
        e.active.compensated = true;
        e
    }

    /// Ψ(s) = Λ(Φ_pd(s) − 1).
    pub(crate) fn compound_poisson(rate: f64, pd: MomentumPd, hbar: f64) -> Self {
        let mut e = Self::new("compound_poisson", hbar);
        e.numeric = matches!(pd, MomentumPd::Tabulated(_));
        e.terms.push(Term::CompoundPoisson { rate, pd });
        e.active.poisson = true;
        e
    }

    pub(crate) fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub(crate) fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    fn push_gaussian(&mut self, a: f64, d: f64) {
        if a != 0.0 {
            self.terms.push(Term::Drift(a));
            self.active.drift = true;
        }
        if d != 0.0 {
            self.terms.push(Term::Diffusion(d));
            self.active.diffusion = true;
        }
    }

    pub fn active_terms(&self) -> ActiveTerms {
        self.active
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// True when some term is evaluated by quadrature or from a tabulation.
    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    pub fn eval(&self, s: f64) -> Result<Complex64> {
        if s < 0.0 {
            return self.eval(-s).map(|v| v.conj());
        }
        if s == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = s / self.hbar;
        let mut total = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            total += match term {
                Term::Drift(a) => Complex64::new(0.0, -a * s),
                Term::Diffusion(d) => Complex64::new(-0.5 * d * s * s, 0.0),
                Term::Stable { k, alpha, x0 } => Complex64::new(-k * (s / x0).abs().powf(*alpha), 0.0),
                Term::CompoundPoisson { rate, pd } => (pd.cf(s, self.hbar) - 1.0) * *rate,
                Term::TabulatedJump { weight, mass, drift_coeff } => {
                    let JumpWeight::Tabulated(t) = weight else { unreachable!() };
                    t.transform(w) - *mass - Complex64::new(0.0, drift_coeff * w)
                }
                Term::QuadratureJump { weight, compensated, q0, spec } => {
                    let f = |q: f64| weight.intensity(q);
                    jump_integral(&f, s, *compensated, *q0, self.hbar, spec)?
                }
                Term::Cross { lambda, omega, spec } => {
                    let f = |q: f64| 2.0 * (omega.amplitude(q) * lambda.amplitude(q).conj()).re;
                    jump_integral(&f, s, false, 1.0, self.hbar, spec)?
                }
            };
        }
        Ok(total)
    }

    /// Ψ on every grid point, in parallel.
    pub fn eval_points(&self, points: &[f64]) -> Result<Vec<Complex64>> {
        points.par_iter().map(|&s| self.eval(s)).collect()
    }
}

/// Evaluates the exponent at every point of `grid`.
pub fn eval_exponent(psi: &CharacteristicExponent, grid: &SeparationGrid) -> Result<Vec<Complex64>> {
    psi.eval_points(grid.points())
}

/// Builds Ψ from a triplet, using closed forms where the triplet is a pure
/// Gaussian or a symmetric power-law measure.
pub fn build_exponent(triplet: &LevyTriplet, quad: &QuadratureSpec) -> Result<CharacteristicExponent> {
    triplet.validate()?;
    if let (JumpWeight::Zero, JumpWeight::PowerLaw { scale, alpha }) = (&triplet.lambda, &triplet.omega) {
        if *alpha > 0.0 && *alpha < 2.0 {
            // c|q|^{−α−1} with c = c_α K (ħ/x0)^α; take x0 = ħ
            let k = scale / crate::models::stable::c_alpha(*alpha);
            let mut e = CharacteristicExponent::stable(k, *alpha, triplet.hbar).with_hbar(triplet.hbar);
            e.push_gaussian(triplet.drift_a, triplet.diffusion_d);
            e.label = "triplet".into();
            return Ok(e);
        }
    }
    build_exponent_numeric(triplet, quad)
}

/// Builds Ψ from a triplet by quadrature only, never dispatching to closed forms.
pub fn build_exponent_numeric(triplet: &LevyTriplet, quad: &QuadratureSpec) -> Result<CharacteristicExponent> {
    triplet.validate()?;
    quad.validate()?;
    let mut e = CharacteristicExponent::new("triplet", triplet.hbar);
    e.push_gaussian(triplet.drift_a, triplet.diffusion_d);

    if !triplet.lambda.is_zero() {
        require(&triplet.lambda, Condition::FiniteRate)?;
        e.terms.push(jump_term(&triplet.lambda, false, triplet.q0, quad)?);
        e.active.poisson = true;
        e.numeric = true;
    }
    if !triplet.omega.is_zero() {
        require(&triplet.omega, Condition::Levy)?;
        e.terms.push(jump_term(&triplet.omega, true, triplet.q0, quad)?);
        e.active.compensated = true;
        e.numeric = true;
    }
    if !triplet.lambda.is_zero() && !triplet.omega.is_zero() {
        let (llo, lhi) = triplet.lambda.support();
        let (olo, ohi) = triplet.omega.support();
        let (lo, hi) = (llo.max(olo).max(quad.window.0), lhi.min(ohi).min(quad.window.1));
        if hi > lo {
            let mut spec = quad.clone();
            spec.window = (lo, hi);
            if triplet.omega.singular_at_zero() && lo < 0.0 && hi > 0.0 {
                spec = spec.with_singularity(0.0);
            }
            e.terms.push(Term::Cross {
                lambda: triplet.lambda.clone(),
                omega: triplet.omega.clone(),
                spec,
            });
            e.active.cross = true;
        }
    }
    Ok(e)
}

fn jump_term(weight: &JumpWeight, compensated: bool, q0: f64, quad: &QuadratureSpec) -> Result<Term> {
    if let JumpWeight::Tabulated(t) = weight {
        let drift_coeff = if compensated {
            let comp = |q: f64| t.value_at(q) * q / (1.0 + (q / q0) * (q / q0));
            let nodes = t.nodes();
            nodes
                .windows(2)
                .map(|w| integrate_real(comp, w[0], w[1], 1e-300, 1e-13))
                .sum::<Result<f64>>()?
        } else {
            0.0
        };
        return Ok(Term::TabulatedJump {
            weight: weight.clone(),
            mass: t.integral(),
            drift_coeff,
        });
    }
    let mut spec = quad.clone();
    if weight.singular_at_zero() && spec.window.0 < 0.0 && spec.window.1 > 0.0 {
        spec = spec.with_singularity(0.0);
    }
    Ok(Term::QuadratureJump {
        weight: weight.clone(),
        compensated,
        q0,
        spec,
    })
}

/// Φ(t, s) sampled on a separation grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceFactor {
    pub t: f64,
    pub grid: SeparationGrid,
    pub values: Vec<Complex64>,
    /// Built through quadrature or transforms rather than closed forms.
    pub numeric: bool,
}

impl DecoherenceFactor {
    pub fn new(t: f64, grid: SeparationGrid, values: Vec<Complex64>, numeric: bool) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values on {} points", values.len(), grid.len())));
        }
        Ok(Self { t, grid, values, numeric })
    }

    /// Audit tolerance matching how the values were produced.
    pub fn default_tolerance(&self) -> f64 {
        if self.numeric {
            1e-6
        } else {
            1e-9
        }
    }
}

/// Φ(t, s) = e^{tΨ(s)} on `grid`.
pub fn cf_at_time(psi: &CharacteristicExponent, t: f64, grid: &SeparationGrid) -> Result<DecoherenceFactor> {
    if !(t >= 0.0) {
        return Err(Error::NegativeTime(t));
    }
    let values = if t == 0.0 {
        vec![Complex64::new(1.0, 0.0); grid.len()]
    } else {
        eval_exponent(psi, grid)?.into_iter().map(|v| (v * t).exp()).collect()
    };
    DecoherenceFactor::new(t, grid.clone(), values, psi.is_numeric())
}
