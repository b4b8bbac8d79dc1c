use serde::Serialize;

use super::{defect, left_inverse, scaled_tol, OperatorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, identity, max_abs, null_basis, range_basis_cutoff, spectral_norm, CMat};
use crate::scalar::{lit, to_f64, Real};

/// Orthonormal basis of `∩_n T^n(H)`, iterating `V ↦ range(T V)` until the
/// dimension stops dropping. Singular values at most `tol·‖T‖` count as zero.
pub fn hyper_range<T: Real>(t: &OperatorMatrix<T>, tol: T) -> CMat<T> {
    let n = t.dim();
    let cutoff = tol * t.norm();
    let mut basis = identity::<T>(n);
    for _ in 0..=n {
        let next = range_basis_cutoff(&(t.matrix() * &basis), cutoff);
        let stable = next.ncols() == basis.ncols();
        basis = next;
        if stable || basis.ncols() == 0 {
            break;
        }
    }
    basis
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WoldReport {
    pub dim: usize,
    pub hyper_range_dim: usize,
    /// `‖PT - TP‖_max`.
    pub reducing_residual: f64,
    pub reducing: bool,
    /// `‖W*W - I‖_max` for the compression `W` of `T` to the hyper-range.
    pub unitary_residual: f64,
    pub unitary_on_hyper_range: bool,
    pub complement_dim: usize,
    /// `dim span{S^n ker S*}` for the compression `S` to the complement.
    pub wandering_dim: usize,
    pub wandering: bool,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

/// Splits `T` along its hyper-range and checks the Wold-type conditions.
pub fn wold_split<T: Real>(t: &OperatorMatrix<T>, tol: T) -> Result<WoldReport> {
    left_inverse(t)?;
    let n = t.dim();
    let q = hyper_range(t, tol);
    let k = q.ncols();
    let p = &q * q.adjoint();
    let tm = t.matrix();
    let reducing_residual = max_abs(&(&p * tm - tm * &p));
    let reducing = reducing_residual <= tol * t.norm().max(T::one());
    let w = q.adjoint() * tm * &q;
    let unitary_residual = if k == 0 { T::zero() } else { max_abs(&(w.adjoint() * &w - identity::<T>(k))) };
    let unitary_on_hyper_range = unitary_residual <= scaled_tol(t, 1, tol);
    let comp = if k == n { CMat::zeros(n, 0) } else { null_basis(&q.adjoint(), lit(1e-10)) };
    let c = comp.ncols();
    let wandering_dim = if c == 0 {
        0
    } else {
        let s = comp.adjoint() * tm * &comp;
        let ker = null_basis(&s.adjoint(), tol);
        let mut span = CMat::zeros(c, 0);
        let mut block = ker;
        for _ in 0..c {
            let cols = span.ncols();
            span = span.insert_columns(cols, block.ncols(), crate::scalar::czero());
            span.view_mut((0, cols), (c, block.ncols())).copy_from(&block);
            block = &s * block;
        }
        crate::linalg::rank(&span, tol)
    };
    let wandering = wandering_dim == c;
    let mut diagnostics = Vec::new();
    if !reducing {
        diagnostics.push(format!("NotReducing: |PT - TP| = {:e}", to_f64(reducing_residual)));
    }
    if !unitary_on_hyper_range {
        diagnostics.push(format!("NotUnitaryOnHyperRange: |W*W - I| = {:e}", to_f64(unitary_residual)));
    }
    if !wandering {
        diagnostics.push(format!("wandering span has dimension {wandering_dim} < {c}"));
    }
    if k == n {
        diagnostics.push("hyper-range is the whole space".into());
    }
    Ok(WoldReport {
        dim: n,
        hyper_range_dim: k,
        reducing_residual: to_f64(reducing_residual),
        reducing,
        unitary_residual: to_f64(unitary_residual),
        unitary_on_hyper_range,
        complement_dim: c,
        wandering_dim,
        wandering,
        pass: reducing && unitary_on_hyper_range && wandering,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenModulusReport {
    pub moduli: Vec<f64>,
    pub max_deviation: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Every eigenvalue of an `m`-isometric matrix lies on the unit circle.
pub fn eigen_modulus_check<T: Real>(t: &OperatorMatrix<T>, m: usize, tol: T) -> Result<EigenModulusReport> {
    let beta = defect(t, m);
    let thr = scaled_tol(t, m, lit(super::DEFAULT_TOL));
    if spectral_norm(&beta) > thr {
        return Err(Error::Precondition(format!("operator is not a {m}-isometry: |β_{m}| = {:e}", to_f64(spectral_norm(&beta)))));
    }
    let moduli: Vec<T> = eigenvalues(t.matrix()).into_iter().map(|z| z.norm_sqr().sqrt()).collect();
    let dev = moduli.iter().fold(T::zero(), |a, &r| a.max((r - T::one()).abs()));
    Ok(EigenModulusReport {
        moduli: moduli.into_iter().map(to_f64).collect(),
        max_deviation: to_f64(dev),
        tol: to_f64(tol),
        pass: dev <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn blockdiag(a: &CMat<f64>, b: &CMat<f64>) -> CMat<f64> {
        let (n, k) = (a.nrows(), b.nrows());
        let mut out = CMat::zeros(n + k, n + k);
        out.view_mut((0, 0), (n, n)).copy_from(a);
        out.view_mut((n, n), (k, k)).copy_from(b);
        out
    }

    fn rot() -> CMat<f64> {
        let (s, c) = 0.3_f64.sin_cos();
        CMat::from_row_slice(2, 2, &[cx(c, 0.0), cx(-s, 0.0), cx(s, 0.0), cx(c, 0.0)])
    }

    fn nilpotent() -> CMat<f64> {
        CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0)])
    }

    fn jordan() -> CMat<f64> {
        CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)])
    }

    #[test]
    fn hyper_range_examples() {
        let inv = OperatorMatrix::new(jordan()).unwrap();
        assert_eq!(hyper_range(&inv, 1e-10).ncols(), 2);
        let nil = OperatorMatrix::new(nilpotent()).unwrap();
        assert_eq!(hyper_range(&nil, 1e-10).ncols(), 0);
        let mixed = OperatorMatrix::new(blockdiag(&rot(), &nilpotent())).unwrap();
        let q = hyper_range(&mixed, 1e-10);
        assert_eq!(q.ncols(), 2);
        // The U-block subspace: rows 2 and 3 vanish.
        assert!(q.rows(2, 2).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn wold_of_unitary_and_jordan() {
        let u = OperatorMatrix::new(rot()).unwrap();
        let rep = wold_split(&u, 1e-9).unwrap();
        assert!(rep.pass && rep.complement_dim == 0);
        let uj = OperatorMatrix::new(blockdiag(&rot(), &jordan())).unwrap();
        let rep = wold_split(&uj, 1e-9).unwrap();
        assert_eq!(rep.hyper_range_dim, 4);
        assert!(!rep.unitary_on_hyper_range && !rep.pass);
        let un = OperatorMatrix::new(blockdiag(&rot(), &nilpotent())).unwrap();
        assert!(matches!(wold_split(&un, 1e-9), Err(Error::NotLeftInvertible { .. })));
    }

    #[test]
    fn eigen_moduli() {
        let j = OperatorMatrix::new(jordan()).unwrap();
        let rep = eigen_modulus_check(&j, 3, 1e-12).unwrap();
        assert!(rep.pass && rep.max_deviation < 1e-12);
        let two = OperatorMatrix::new(identity::<f64>(2) * cx(2.0, 0.0)).unwrap();
        assert!(matches!(eigen_modulus_check(&two, 3, 1e-12), Err(Error::Precondition(_))));
    }
}
