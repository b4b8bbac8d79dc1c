use dsl_core::corpus::Corpus;
use dsl_core::dirichlet::dirichlet_norm_sq;
use dsl_core::io::{MeasureJson, OperatorJson, PolynomialJson, TupleJson};
use dsl_core::linalg::{hermitian_deviation, max_abs, min_eigenvalue};
use dsl_core::measures::{block_toeplitz, MomentSource};
use dsl_core::operators::{hockey_stick, recursion_residual};
use dsl_core::recovery::{recover_moments, toeplitz_feasibility};
use dsl_core::spaces::{gram, gram_norm_sq, tuple_norm_sq};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn moments_are_hermitian_symmetric(seed in any::<u64>(), dim in 1usize..=3, j in 0i64..12) {
        let mu = Corpus::new(seed).measure::<f64>(dim);
        prop_assert!(max_abs(&(mu.moment(-j) - mu.moment(j).adjoint())) < 1e-12);
    }

    #[test]
    fn toeplitz_of_a_measure_is_psd(seed in any::<u64>(), dim in 1usize..=2, s in 0usize..8) {
        let mu = Corpus::new(seed).measure::<f64>(dim);
        let t = block_toeplitz(&mu, s);
        let scale = max_abs(&t).max(1.0);
        prop_assert!(min_eigenvalue(&t) >= -1e-10 * scale);
    }

    #[test]
    fn dirichlet_forms_are_nonnegative(seed in any::<u64>(), dim in 1usize..=3, deg in 0usize..10, n in 0usize..6) {
        let mut c = Corpus::new(seed);
        let mu = c.measure::<f64>(dim);
        let f = c.polynomial::<f64>(dim, deg);
        let v = dirichlet_norm_sq(&mu, n, &f).unwrap();
        prop_assert!(v >= -1e-10 * (1.0 + v.abs()));
    }

    #[test]
    fn shift_raises_every_order(seed in any::<u64>(), dim in 1usize..=2, deg in 0usize..8, n in 0usize..5) {
        let mut c = Corpus::new(seed);
        let mu = c.measure::<f64>(dim);
        let f = c.polynomial::<f64>(dim, deg);
        let (a, b, lower) = (
            dirichlet_norm_sq(&mu, n + 1, &f.shift()).unwrap(),
            dirichlet_norm_sq(&mu, n + 1, &f).unwrap(),
            dirichlet_norm_sq(&mu, n, &f).unwrap(),
        );
        prop_assert!((a - b - lower).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
    }

    #[test]
    fn dilation_never_increases(seed in any::<u64>(), r in 0.01f64..1.0, n in 0usize..5) {
        let mut c = Corpus::new(seed);
        let dim = c.index(1, 3);
        let mu = c.measure::<f64>(dim);
        let f = c.polynomial::<f64>(dim, 6);
        let base = dirichlet_norm_sq(&mu, n, &f).unwrap();
        prop_assert!(dirichlet_norm_sq(&mu, n, &f.dilate(r).unwrap()).unwrap() <= base + 1e-10 * base.max(1.0));
    }

    #[test]
    fn gram_is_hermitian_psd_and_matches_norm(seed in any::<u64>(), m in 2usize..=4, dim in 1usize..=2) {
        let mut c = Corpus::new(seed);
        let tuple = c.tuple::<f64>(m, dim, false);
        let f = c.polynomial::<f64>(dim, 6);
        let g = gram(&tuple, 6);
        let scale = max_abs(&g.matrix);
        prop_assert!(hermitian_deviation(&g.matrix) <= 1e-12 * scale);
        prop_assert!(min_eigenvalue(&g.matrix) >= -1e-10 * scale);
        let (a, b) = (gram_norm_sq(&g, &f), tuple_norm_sq(&tuple, &f).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * b.max(1.0));
    }

    #[test]
    fn recovered_moments_are_feasible(seed in any::<u64>(), m in 2usize..=4, dim in 1usize..=2) {
        let tuple = Corpus::new(seed).tuple::<f64>(m, dim, true);
        let g = gram(&tuple, 12);
        for r in 1..m {
            let q = recover_moments(&g, m, r, 12 - m).unwrap();
            prop_assert!(toeplitz_feasibility(&q, 12 - m).unwrap().feasible);
            prop_assert!(q.hermitian_defect() < 1e-10);
        }
    }

    #[test]
    fn defect_recursion_holds(seed in any::<u64>(), dim in 1usize..=4, m in 0usize..6) {
        let mut c = Corpus::new(seed);
        let t = if c.index(0, 1) == 0 { c.m_isometry::<f64>(dim, 3).0 } else { c.contraction::<f64>(dim) };
        let scale = (1.0 + t.norm().powi(2)).powi(m as i32 + 1);
        prop_assert!(recursion_residual(&t, m) <= 1e-12 * scale);
    }

    #[test]
    fn m_isometries_classify_within_order(seed in any::<u64>(), dim in 1usize..=4) {
        let (t, m) = Corpus::new(seed).m_isometry::<f64>(dim, 3);
        let c = dsl_core::operators::classify(&t, 8, 1e-9).unwrap();
        prop_assert!(c.isometric_order.is_some_and(|k| k <= m));
    }

    #[test]
    fn hockey_stick_sums(p in 2u64..40, r in 1u64..39) {
        prop_assume!(r < p);
        prop_assert!(hockey_stick(p, r).is_ok());
    }

    #[test]
    fn json_round_trips(seed in any::<u64>(), m in 2usize..=3, dim in 1usize..=2) {
        let mut c = Corpus::new(seed);
        let tuple = c.tuple::<f64>(m, dim, false);
        let f = c.polynomial::<f64>(dim, 4);
        let (t, _) = c.m_isometry::<f64>(dim + 1, 2);

        let text = serde_json::to_string(&TupleJson::from_tuple(&tuple)).unwrap();
        let back = serde_json::from_str::<TupleJson>(&text).unwrap().build::<f64>().unwrap();
        for r in 1..m {
            for j in -4..=4 {
                prop_assert!(max_abs(&(back.measure(r).moment(j) - tuple.measure(r).moment(j))) < 1e-12);
            }
        }
        let text = serde_json::to_string(&PolynomialJson::from_polynomial(&f)).unwrap();
        prop_assert_eq!(serde_json::from_str::<PolynomialJson>(&text).unwrap().build::<f64>().unwrap(), f);
        let text = serde_json::to_string(&OperatorJson::from_operator(&t)).unwrap();
        let (t2, basis) = serde_json::from_str::<OperatorJson>(&text).unwrap().build::<f64>().unwrap();
        prop_assert!(basis.is_none());
        prop_assert_eq!(t2.matrix(), t.matrix());
        let mu = tuple.measure(1);
        let text = serde_json::to_string(&MeasureJson::from_measure(mu)).unwrap();
        let mu2 = serde_json::from_str::<MeasureJson>(&text).unwrap().build::<f64>().unwrap();
        prop_assert!(max_abs(&(mu2.moment(3) - mu.moment(3))) < 1e-12);
    }
}
