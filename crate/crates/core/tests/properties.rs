use num_complex::Complex64;
use proptest::prelude::*;

use levy_decoherence::evolution::{
    apply_superoperator, evolve_closed_form, jump_expansion_evolve, visibility, JumpConfig, OffDiagonalState,
    PathSeparationWeights,
};
use levy_decoherence::levy::{build_exponent_numeric, cf_at_time, CharacteristicExponent};
use levy_decoherence::models::{
    compound_poisson_exponent, stable_exponent, stable_triplet, MandelParams, MomentumPd, StableParams, Tabulation,
};
use levy_decoherence::spectral::{pd_to_cf, QuadratureSpec, UniformGridPair};
use levy_decoherence::SeparationGrid;

/// One exponent from each closed-form family.
fn exponents(a: f64, d: f64, rate: f64, k0: f64, alpha: f64, k: f64, x0: f64) -> Vec<CharacteristicExponent> {
    vec![
        CharacteristicExponent::gaussian(a, d),
        compound_poisson_exponent(rate, &MomentumPd::mandel(MandelParams::new(k0).unwrap()), 1.0).unwrap(),
        compound_poisson_exponent(rate, &MomentumPd::gaussian(a, k0).unwrap(), 1.0).unwrap(),
        stable_exponent(&StableParams::new(alpha, k, x0).unwrap()).unwrap(),
    ]
}

prop_compose! {
    fn family()(a in -2.0..2.0f64, d in 0.0..3.0f64, rate in 0.0..5.0f64, k0 in 0.1..3.0f64,
                alpha in 0.1..=2.0f64, k in 0.1..3.0f64, x0 in 0.2..4.0f64)
        -> Vec<CharacteristicExponent> {
        exponents(a, d, rate, k0, alpha, k, x0)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exponent_axioms(psis in family(), s in -50.0..50.0f64) {
        for psi in &psis {
            prop_assert_eq!(psi.eval(0.0).unwrap(), Complex64::new(0.0, 0.0));
            let v = psi.eval(s).unwrap();
            prop_assert!(v.re <= 0.0);
            let m = psi.eval(-s).unwrap();
            prop_assert!((m - v.conj()).norm() <= 1e-14 * v.norm().max(1.0));
        }
    }

    #[test]
    fn semigroup(psis in family(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let grid = SeparationGrid::uniform(-6.0, 6.0, 49).unwrap();
        for psi in &psis {
            let both = cf_at_time(psi, t1 + t2, &grid).unwrap();
            let a = cf_at_time(psi, t1, &grid).unwrap();
            let b = cf_at_time(psi, t2, &grid).unwrap();
            for ((x, y), z) in a.values.iter().zip(&b.values).zip(&both.values) {
                prop_assert!((x * y - z).norm() <= 1e-12 * z.norm().max(1e-300) + 1e-300);
            }
        }
    }

    #[test]
    fn modulus_never_grows(psis in family(), t1 in 0.0..3.0f64, dt in 0.0..3.0f64) {
        let grid = SeparationGrid::uniform(-6.0, 6.0, 49).unwrap();
        for psi in &psis {
            let early = cf_at_time(psi, t1, &grid).unwrap();
            let late = cf_at_time(psi, t1 + dt, &grid).unwrap();
            for (e, l) in early.values.iter().zip(&late.values) {
                prop_assert!(l.norm() <= e.norm() * (1.0 + 1e-15));
            }
        }
    }

    #[test]
    fn visibility_is_a_contrast(psis in family(), t in 0.0..3.0f64, raw in prop::collection::vec(0.0..1.0f64, 21)) {
        let grid = SeparationGrid::uniform(0.0, 8.0, 21).unwrap();
        let total: f64 = raw.iter().sum::<f64>() + 1e-3;
        let w: Vec<f64> = raw.iter().map(|x| (x + 1e-3 / 21.0) / total).collect();
        let weights = PathSeparationWeights::new(grid.clone(), w).unwrap();
        for psi in &psis {
            let v = visibility(&cf_at_time(psi, t, &grid).unwrap(), &weights).unwrap();
            prop_assert!((0.0..=1.0).contains(&v));
            if t == 0.0 {
                prop_assert_eq!(v, 1.0);
            }
        }
    }

    #[test]
    fn stable_scaling(alpha in 0.1..=2.0f64, k in 0.1..3.0f64, x0 in 0.2..4.0f64, s in 0.01..20.0f64, c in 0.05..20.0f64) {
        let psi = stable_exponent(&StableParams::new(alpha, k, x0).unwrap()).unwrap();
        let lhs = psi.eval(c * s).unwrap();
        let rhs = psi.eval(s).unwrap() * c.powf(alpha);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }

    #[test]
    fn mandel_is_hermitian_and_bounded(k0 in 0.01..100.0f64, s in -1e3..1e3f64) {
        let p = MandelParams::new(k0).unwrap();
        prop_assert!((p.cf(-s) - p.cf(s).conj()).norm() < 1e-15);
        prop_assert!(p.cf(s).norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn superoperator_powers_compose(n in 0u32..6, m in 0u32..6, k0 in 0.1..3.0f64) {
        let pd = MomentumPd::mandel(MandelParams::new(k0).unwrap());
        let grid = SeparationGrid::uniform(-10.0, 10.0, 81).unwrap();
        let state = OffDiagonalState::ones(&grid);
        let twice = apply_superoperator(&pd, &apply_superoperator(&pd, &state, n, 1.0), m, 1.0);
        let once = apply_superoperator(&pd, &state, n + m, 1.0);
        for (a, b) in twice.values.iter().zip(&once.values) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn jump_expansion_within_tail_bound(nbar in 0.0..30.0f64, k0 in 0.1..3.0f64) {
        let p = MandelParams::new(k0).unwrap();
        let grid = SeparationGrid::uniform(-10.0, 10.0, 81).unwrap();
        let state = OffDiagonalState::ones(&grid);
        let cf = |s: f64| p.cf(s);
        let (jumped, w) = jump_expansion_evolve(&state, &cf, &JumpConfig::with_mean(nbar)).unwrap();
        let psi = compound_poisson_exponent(nbar, &MomentumPd::mandel(p), 1.0).unwrap();
        let closed = evolve_closed_form(&state, &psi, 1.0).unwrap();
        for (a, b) in jumped.values.iter().zip(&closed.values) {
            prop_assert!((a - b).norm() <= w.tail + 1e-13);
        }
    }

    #[test]
    fn transform_is_linear(
        f in prop::collection::vec(0.0..1.0f64, 12),
        g in prop::collection::vec(0.0..1.0f64, 12),
        a in -3.0..3.0f64,
        b in -3.0..3.0f64,
        omega in -40.0..40.0f64,
    ) {
        let q: Vec<f64> = (0..12).map(|i| i as f64 * 0.37 + (i * i) as f64 * 0.01).collect();
        let tf = Tabulation::new(q.clone(), f.clone()).unwrap();
        let tg = Tabulation::new(q.clone(), g.clone()).unwrap();
        // shift so the combination stays non-negative, then remove the shift
        let shift = 3.0 * 2.0;
        let h: Vec<f64> = f.iter().zip(&g).map(|(x, y)| a * x + b * y + shift).collect();
        let th = Tabulation::new(q.clone(), h).unwrap();
        let ones = Tabulation::new(q, vec![shift; 12]).unwrap();
        let lhs = th.transform(omega) - ones.transform(omega);
        let rhs = tf.transform(omega) * a + tg.transform(omega) * b;
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm() + ones.transform(omega).norm()));
    }

    #[test]
    fn parseval(mu in -2.0..2.0f64, sigma in 0.5..2.0f64) {
        let pair = UniformGridPair::with_window(-16.0, 32.0, 1 << 14, 1.0).unwrap();
        let t = MomentumPd::gaussian(mu, sigma).unwrap().tabulate_on(&pair).unwrap();
        let pd = MomentumPd::tabulated(t).unwrap();
        let cf = pd_to_cf(&pd, &pair).unwrap();
        let t = pd.as_tabulation().unwrap();
        // exact ∫f² of the piecewise-linear interpolant the transform is taken of
        let lhs: f64 = t
            .values()
            .windows(2)
            .map(|w| (w[0] * w[0] + w[0] * w[1] + w[1] * w[1]) / 3.0)
            .sum::<f64>()
            * pair.dq();
        let rhs: f64 = cf.iter().map(|c| c.norm_sqr()).sum::<f64>() * pair.ds() / (2.0 * std::f64::consts::PI);
        prop_assert!((lhs - rhs).abs() <= 1e-6 * lhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn quadrature_exponent_scaling(alpha in 0.3..1.9f64, s in 0.05..5.0f64, c in 0.2..5.0f64) {
        let p = StableParams::new(alpha, 1.0, 1.0).unwrap();
        let psi = build_exponent_numeric(&stable_triplet(&p, 1.0).unwrap(), &QuadratureSpec::default()).unwrap();
        let lhs = psi.eval(c * s).unwrap();
        let rhs = psi.eval(s).unwrap() * c.powf(alpha);
        prop_assert!((lhs - rhs).norm() <= 1e-6 * rhs.norm());
    }

    #[test]
    fn quadrature_exponent_axioms(alpha in 0.3..1.9f64, s in -20.0..20.0f64) {
        let p = StableParams::new(alpha, 0.7, 1.3).unwrap();
        let psi = build_exponent_numeric(&stable_triplet(&p, 1.0).unwrap(), &QuadratureSpec::default()).unwrap();
        let v = psi.eval(s).unwrap();
        prop_assert!(v.re <= 0.0);
        prop_assert_eq!(psi.eval(-s).unwrap(), v.conj());
    }
}
