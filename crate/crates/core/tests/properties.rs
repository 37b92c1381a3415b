use num_complex::Complex64;
use proptest::prelude::*;

use fhlab::determinants::{toeplitz_logdet, LogDet};
use fhlab::ensembles::EvenSymbol;
use fhlab::harness::{catalog, derive_seed, run_case, CaseKind, CaseSpec, Criteria, RunOptions};
use fhlab::precision::PrecisionContext;
use fhlab::specfun::wrap_phase;
use fhlab::symbols::{symbol_fourier, FHSymbol, FourierSeries, Singularity};

fn spec(id: &str, setup: CaseKind, n: Vec<usize>, tolerance: f64) -> CaseSpec {
    CaseSpec {
        id: id.into(),
        formula: "property".into(),
        description: String::new(),
        setup,
        n,
        precision: None,
        mc: None,
        tolerance,
        criteria: Criteria::default(),
    }
}

fn assert_passes(c: &CaseSpec) {
    let r = run_case(c, &RunOptions::default()).unwrap();
    assert!(r.passed, "{}: {:?}", r.verdict, r.records);
}

fn smooth_series(c: &[(f64, f64)]) -> FourierSeries {
    let mut s = FourierSeries::zero(c.len());
    for (k, &(re, im)) in c.iter().enumerate() {
        s.set(k as i64 + 1, Complex64::new(re, im));
        s.set(-(k as i64) - 1, Complex64::new(-0.5 * re, 0.5 * im));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_charge_determinant_is_a_gamma_product(q in 0.05f64..1.5, b in -0.4f64..0.4, n in 1usize..12) {
        let grid: Vec<usize> = (1..=n).collect();
        assert_passes(&spec("charge", CaseKind::CircleCharge { q, b }, grid, 1e-9));
    }

    #[test]
    fn unitary_average_factorizes(
        c in prop::collection::vec(-0.2f64..0.2, 1..5),
        phi in 0.2f64..2.9,
        a in 0.0f64..1.2,
    ) {
        let symbol = EvenSymbol { cos_coeffs: c, points: vec![(phi, a)] };
        assert_passes(&spec("factorization", CaseKind::GroupFactorization { symbol }, vec![1, 2, 3], 1e-9));
    }

    #[test]
    fn reflection_leaves_toeplitz_determinant(
        c in prop::collection::vec((-0.3f64..0.3, -0.3f64..0.3), 1..4),
        theta in -3.0f64..3.0,
        a in 0.0f64..1.0,
        b in -0.4f64..0.4,
        n in 1usize..16,
    ) {
        let sym = FHSymbol::new(smooth_series(&c), vec![Singularity::new(theta, a, b)]).unwrap();
        let ctx = PrecisionContext::double();
        let d0 = toeplitz_logdet(&symbol_fourier(&sym, n).unwrap(), n, ctx).unwrap();
        let d1 = toeplitz_logdet(&symbol_fourier(&sym.reflected(), n).unwrap(), n, ctx).unwrap();
        prop_assert!((d0.log_modulus - d1.log_modulus).abs() < 1e-8);
        prop_assert!(wrap_phase(d0.phase - d1.phase).abs() < 1e-8);
    }

    #[test]
    fn logdet_mul_div_inverse(l1 in -50f64..50.0, p1 in -10f64..10.0, l2 in -50f64..50.0, p2 in -10f64..10.0) {
        let (x, y) = (LogDet::new(l1, p1), LogDet::new(l2, p2));
        let z = x.mul(y).div(y);
        prop_assert!((z.log_modulus - x.log_modulus).abs() < 1e-12);
        prop_assert!(wrap_phase(z.phase - x.phase).abs() < 1e-12);
        prop_assert!(x.phase > -std::f64::consts::PI && x.phase <= std::f64::consts::PI);
    }

    #[test]
    fn case_json_round_trip(k in 0usize..64, tol in 1e-12f64..1.0, extra in 65usize..200) {
        let all = catalog::builtin();
        let mut c = all[k % all.len()].clone();
        c.tolerance = tol;
        c.n.push(extra.max(c.n.last().unwrap() + 1));
        let text = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(CaseSpec::from_json(&text).unwrap(), c);
    }

    #[test]
    fn norm_ratio_holds(n in 1usize..16) {
        assert_passes(&spec("norm", CaseKind::NormRatio, vec![n], 1e-10));
    }

    #[test]
    fn seeds_are_stable_and_spread(base in any::<u64>(), i in 0u64..1000, label in "[a-z-]{1,12}") {
        prop_assert_eq!(derive_seed(base, &label, i), derive_seed(base, &label, i));
        prop_assert_ne!(derive_seed(base, &label, i), derive_seed(base, &label, i + 1));
        prop_assert_ne!(derive_seed(base, &label, i), derive_seed(base.wrapping_add(1), &label, i));
    }
}
