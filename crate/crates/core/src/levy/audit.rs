//! Checks that sampled values behave like a characteristic function.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::exponent::DecoherenceFactor;
use crate::error::{Axiom, Error, Result};

/// Points per Gram matrix.
const PROBE_SIZE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub tolerance: f64,
    pub max_modulus: f64,
    pub normalization_error: f64,
    pub hermitian_error: f64,
    /// Smallest eigenvalue over all probed Gram matrices.
    pub min_eigenvalue: f64,
    pub probes: usize,
}

/// Audits with the tolerance the factor's provenance calls for.
pub fn cf_property_audit(phi: &DecoherenceFactor, probe_count: usize, seed: u64) -> Result<AuditReport> {
    cf_property_audit_with_tol(phi, probe_count, seed, phi.default_tolerance())
}

/// Checks |Φ| ≤ 1, Φ(0) = 1, Φ(−s) = conj Φ(s) and positive semidefiniteness
/// of Gram matrices [Φ(s_i − s_j)] on random subsets of the grid.
///
/// The grid must be uniform, symmetric and contain 0 so that differences of
/// probed points are grid points again.
pub fn cf_property_audit_with_tol(
    phi: &DecoherenceFactor,
    probe_count: usize,
    seed: u64,
    tol: f64,
) -> Result<AuditReport> {
    let s = phi.grid.points();
    let v = &phi.values;
    let n = s.len();

    let (imax, max_modulus) = v
        .iter()
        .map(|z| z.norm())
        .enumerate()
        .fold((0, 0.0), |best, (i, m)| if m > best.1 { (i, m) } else { best });
    if max_modulus > 1.0 + tol {
        return Err(Error::AuditFailed {
            axiom: Axiom::Modulus,
            detail: format!("|Φ| = {max_modulus}"),
            witness: vec![s[imax]],
        });
    }

    let zero = phi
        .grid
        .zero_index()
        .ok_or_else(|| Error::InvalidGrid("audit grid must contain s = 0".into()))?;
    let normalization_error = (v[zero] - 1.0).norm();
    if normalization_error > tol {
        return Err(Error::AuditFailed {
            axiom: Axiom::Normalization,
            detail: format!("Φ(0) = {}", v[zero]),
            witness: vec![0.0],
        });
    }

    if !phi.grid.is_symmetric() {
        return Err(Error::InvalidGrid("audit grid must be symmetric about 0".into()));
    }
    let (iworst, hermitian_error) = (0..n)
        .map(|i| (v[n - 1 - i] - v[i].conj()).norm())
        .enumerate()
        .fold((0, 0.0), |best, (i, e)| if e > best.1 { (i, e) } else { best });
    if hermitian_error > tol {
        return Err(Error::AuditFailed {
            axiom: Axiom::Hermitian,
            detail: format!("|Φ(−s) − conj Φ(s)| = {hermitian_error:e}"),
            witness: vec![s[iworst], s[n - 1 - iworst]],
        });
    }

    if phi.grid.uniform_step().is_none() {
        return Err(Error::InvalidGrid("audit grid must be uniform".into()));
    }
    // points within the central half keep every difference on the grid
    let half = zero / 2;
    let candidates: Vec<usize> = (zero - half..=zero + half).collect();
    let size = PROBE_SIZE.min(candidates.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let subsets: Vec<Vec<usize>> = (0..probe_count)
        .map(|_| {
            let mut idx: Vec<usize> = sample(&mut rng, candidates.len(), size)
                .into_iter()
                .map(|k| candidates[k])
                .collect();
            idx.sort_unstable();
            idx
        })
        .collect();

    let minima: Vec<(f64, usize)> = subsets
        .par_iter()
        .enumerate()
        .map(|(p, idx)| {
            let m = idx.len();
            let gram = DMatrix::<Complex64>::from_fn(m, m, |i, j| v[zero + idx[i] - idx[j]]);
            let hermitian = (&gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
            let ev = hermitian.symmetric_eigenvalues();
            (ev.iter().copied().fold(f64::INFINITY, f64::min), p)
        })
        .collect();
    let (min_eigenvalue, worst) = minima
        .iter()
        .copied()
        .fold((f64::INFINITY, 0), |best, x| if x.0 < best.0 { x } else { best });
    if min_eigenvalue < -tol {
        return Err(Error::AuditFailed {
            axiom: Axiom::PositiveDefinite,
            detail: format!("Gram eigenvalue {min_eigenvalue:e}"),
            witness: subsets[worst].iter().map(|&i| s[i]).collect(),
        });
    }

    Ok(AuditReport {
        tolerance: tol,
        max_modulus,
        normalization_error,
        hermitian_error,
        min_eigenvalue: if probe_count == 0 { 0.0 } else { min_eigenvalue },
        probes: probe_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::SeparationGrid;
    use crate::levy::{cf_at_time, CharacteristicExponent};

    fn gaussian_phi() -> DecoherenceFactor {
        let psi = CharacteristicExponent::gaussian(0.4, 1.0);
        cf_at_time(&psi, 1.0, &SeparationGrid::uniform(-6.0, 6.0, 241).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_passes() {
        let r = cf_property_audit(&gaussian_phi(), 32, 7).unwrap();
        assert!(r.max_modulus <= 1.0);
        assert_eq!(r.probes, 32);
    }

    #[test]
    fn clipped_modulus_fails() {
        let mut phi = gaussian_phi();
        phi.values[10] = Complex64::new(1.01, 0.0);
        match cf_property_audit(&phi, 8, 1) {
            Err(Error::AuditFailed { axiom: Axiom::Modulus, witness, .. }) => {
                assert_eq!(witness, vec![phi.grid.points()[10]]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_positive_definite_fails() {
        // 1 − s²/4 on [−2, 2] is Hermitian, bounded, unit at 0, but not a CF
        let grid = SeparationGrid::uniform(-4.0, 4.0, 161).unwrap();
        let values = grid
            .points()
            .iter()
            .map(|&s| Complex64::new((1.0 - s * s / 4.0).max(-1.0), 0.0))
            .collect();
        let phi = DecoherenceFactor::new(1.0, grid, values, false).unwrap();
        assert!(matches!(
            cf_property_audit(&phi, 16, 3),
            Err(Error::AuditFailed { axiom: Axiom::PositiveDefinite, .. })
        ));
    }

    #[test]
    fn asymmetric_values_fail_hermitian() {
        let mut phi = gaussian_phi();
        phi.values[5] *= Complex64::new(0.0, 1.0);
        assert!(matches!(
            cf_property_audit(&phi, 4, 1),
            Err(Error::AuditFailed { axiom: Axiom::Hermitian, .. })
        ));
    }
}
