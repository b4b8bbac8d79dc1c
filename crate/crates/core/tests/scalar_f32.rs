use dsl_core::corpus::Corpus;
use dsl_core::dirichlet::{verify_difference_identities, IdentityConfig};
use dsl_core::linalg::{max_abs, CMat};
use dsl_core::operators::{classify, defect, OperatorMatrix};
use dsl_core::scalar::cx;
use dsl_core::spaces::{defect_form, tuple_norm_sq};

#[test]
fn identities_hold_in_single_precision() {
    let mut c = Corpus::new(5);
    let cfg = IdentityConfig::<f32> { exact_tol: 1e-4, skip_quadrature: true, ..IdentityConfig::default() };
    for _ in 0..10 {
        let dim = c.index(1, 2);
        let mu = c.measure::<f32>(dim);
        let f = c.polynomial::<f32>(dim, 5);
        let reps = verify_difference_identities(&mu, &f, 3, &cfg).unwrap();
        assert!(reps.iter().all(|r| r.pass), "{reps:?}");
    }
}

#[test]
fn jordan_block_in_single_precision() {
    let one = cx(1.0f32, 0.0);
    let zero = cx(0.0f32, 0.0);
    let t = OperatorMatrix::new(CMat::from_row_slice(2, 2, &[one, one, zero, one])).unwrap();
    assert_eq!(defect(&t, 2)[(1, 1)], cx(2.0, 0.0));
    assert_eq!(max_abs(&defect(&t, 3)), 0.0);
    assert_eq!(classify(&t, 4, 1e-5).unwrap().isometric_order, Some(3));
}

#[test]
fn model_shift_in_single_precision() {
    let mut c = Corpus::new(9);
    let tuple = c.tuple::<f32>(3, 2, true);
    let f = c.polynomial::<f32>(2, 4);
    let v = defect_form(&tuple, 3, &f, &f).unwrap().norm();
    assert!(v <= 1e-3 * (1.0 + tuple_norm_sq(&tuple, &f).unwrap()));
}
