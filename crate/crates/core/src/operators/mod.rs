//! Finite matrices standing in for bounded operators: defect operators,
//! classification, left inverses and the inequality checks built on them.

mod combinatorics;
mod inequality;
mod structure;

pub use combinatorics::{
    concave_growth_check, hockey_stick, recursion_residual, weighted_shift_equivalence, weighted_shift_matrix, ConcaveGrowthReport,
    WeightedShiftReport,
};
pub use inequality::{
    inequality_check, shimorin_check, shimorin_model_check, InequalityReport, InequalityRow, PsiRow, ShimorinModelReport,
    ShimorinReport, Verdict,
};
pub use structure::{eigen_modulus_check, hyper_range, wold_split, EigenModulusReport, WoldReport};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, identity, max_abs, max_eigenvalue, min_eigenvalue, solve, spectral_norm, CMat};
use crate::scalar::{binom, creal, lit, to_f64, Real};

/// Default PSD/zero threshold before noise scaling.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default classification cap.
pub const DEFAULT_CAP: usize = 8;
/// Default truncation of the series in the model inequalities.
pub const DEFAULT_TERMS: usize = 64;
/// `T*T` must have smallest eigenvalue at least this for `T` to count as left invertible.
pub const LEFT_INVERTIBLE_TOL: f64 = 1e-10;

/// A dense square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix<T: Real> {
    m: CMat<T>,
}

impl<T: Real> OperatorMatrix<T> {
    pub fn new(m: CMat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Precondition("operator has non-finite entries".into()));
        }
        Ok(Self { m })
    }

    pub fn identity(n: usize) -> Self {
        Self { m: identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.m
    }

    pub fn adjoint(&self) -> CMat<T> {
        self.m.adjoint()
    }

    pub fn norm(&self) -> T {
        spectral_norm(&self.m)
    }

    /// `T*T`.
    pub fn gram(&self) -> CMat<T> {
        self.m.adjoint() * &self.m
    }
}

/// `β_m(T) = Σ_{j=0}^m (-1)^{m-j} C(m,j) T*^j T^j`.
pub fn defect<T: Real>(t: &OperatorMatrix<T>, m: usize) -> CMat<T> {
    let n = t.dim();
    let mut acc = CMat::zeros(n, n);
    let mut p = identity::<T>(n);
    let adj = t.adjoint();
    for j in 0..=m {
        let sign = if (m - j).is_multiple_of(2) { T::one() } else { -T::one() };
        acc += &p * creal(sign * binom::<T>(m as u64, j as u64));
        p = &adj * &p * t.matrix();
    }
    hermitian_part(&acc)
}

/// All defects `β_0..=β_top`.
pub fn defects<T: Real>(t: &OperatorMatrix<T>, top: usize) -> Vec<CMat<T>> {
    (0..=top).map(|m| defect(t, m)).collect()
}

/// `tol · (1 + ‖T‖²)^r`, the floating-point scale of `β_r(T)`.
pub fn scaled_tol<T: Real>(t: &OperatorMatrix<T>, r: usize, tol: T) -> T {
    let nt = t.norm();
    tol * (T::one() + nt * nt).powi(r as i32)
}

/// `L_T = (T*T)^{-1} T*`.
pub fn left_inverse<T: Real>(t: &OperatorMatrix<T>) -> Result<CMat<T>> {
    let g = t.gram();
    let lo = min_eigenvalue(&g);
    if lo < lit(LEFT_INVERTIBLE_TOL) {
        return Err(Error::NotLeftInvertible { eigenvalue: to_f64(lo) });
    }
    solve(&g, &t.adjoint()).ok_or(Error::NotLeftInvertible { eigenvalue: to_f64(lo) })
}

/// Cauchy dual `T' = T (T*T)^{-1}`.
pub fn cauchy_dual<T: Real>(t: &OperatorMatrix<T>) -> Result<CMat<T>> {
    Ok(left_inverse(t)?.adjoint())
}

/// Result of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub cap: usize,
    /// Smallest `m ≤ cap` with `β_m ≈ 0`.
    pub isometric_order: Option<usize>,
    /// Every `m ≤ cap` with `β_m ≤ 0`.
    pub concave_orders: Vec<usize>,
    pub expansive: bool,
    pub left_invertible: bool,
    /// `‖β_r‖` for `r = 0..=cap+1`.
    pub defect_norms: Vec<f64>,
    /// Scaled thresholds used per order.
    pub thresholds: Vec<f64>,
    /// `‖β_{m+1}‖ ≤ 10·tol` when an isometric order `m` was found.
    pub next_defect_consistent: bool,
    pub inequality: Option<InequalityReport>,
}

pub fn classify<T: Real>(t: &OperatorMatrix<T>, cap: usize, tol: T) -> Result<Classification> {
    if cap > 8 {
        return Err(Error::Precondition(format!("cap = {cap} exceeds 8")));
    }
    let betas = defects(t, cap + 1);
    let thresholds: Vec<T> = (0..=cap + 1).map(|r| scaled_tol(t, r, tol)).collect();
    let norms: Vec<T> = betas.iter().map(spectral_norm).collect();
    let isometric_order = (1..=cap).find(|&m| norms[m] <= thresholds[m]);
    let concave_orders = (1..=cap).filter(|&m| max_eigenvalue(&betas[m]) <= thresholds[m]).collect();
    let expansive = min_eigenvalue(&betas[1]) >= -thresholds[1];
    let left_invertible = min_eigenvalue(&t.gram()) >= lit(LEFT_INVERTIBLE_TOL);
    let next_defect_consistent =
        isometric_order.is_none_or(|m| norms[m + 1] <= lit::<T>(10.0) * thresholds[m + 1]);
    let inequality = match isometric_order {
        Some(m) if left_invertible => Some(inequality_check(t, m, DEFAULT_TERMS, tol)?),
        _ => None,
    };
    Ok(Classification {
        cap,
        isometric_order,
        concave_orders,
        expansive,
        left_invertible,
        defect_norms: norms.into_iter().map(to_f64).collect(),
        thresholds: thresholds.into_iter().map(to_f64).collect(),
        next_defect_consistent,
        inequality,
    })
}

/// Residuals of the range-projection identities for a left invertible `T`:
/// `‖L T - I‖`, `‖(TL)² - TL‖`, `‖(TL)* - TL‖` and
/// `max_j ‖(I - T^j L^j) - Σ_{p<j} T^p (I - TL) L^p‖` for `j ≤ jmax`.
pub fn projection_residuals<T: Real>(t: &OperatorMatrix<T>, jmax: usize) -> Result<[T; 4]> {
    let l = left_inverse(t)?;
    let n = t.dim();
    let id = identity::<T>(n);
    let tl = t.matrix() * &l;
    let r0 = max_abs(&(&l * t.matrix() - &id));
    let r1 = max_abs(&(&tl * &tl - &tl));
    let r2 = max_abs(&(tl.adjoint() - &tl));
    let p = &id - &tl;
    let mut r3 = T::zero();
    let (mut tj, mut lj) = (id.clone(), id.clone());
    let mut sum = CMat::zeros(n, n);
    for _ in 1..=jmax {
        sum += &tj * &p * &lj;
        tj = &tj * t.matrix();
        lj = &lj * &l;
        r3 = r3.max(max_abs(&(&id - &tj * &lj - &sum)));
    }
    Ok([r0, r1, r2, r3])
}

/// `T*^n T^n`.
pub(crate) fn power_gram<T: Real>(t: &OperatorMatrix<T>, n: usize) -> CMat<T> {
    let tn = crate::linalg::matrix_power(t.matrix(), n);
    tn.adjoint() * tn
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn jordan() -> OperatorMatrix<f64> {
        OperatorMatrix::new(CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]))
            .unwrap()
    }

    fn scalar_op(c: f64, n: usize) -> OperatorMatrix<f64> {
        OperatorMatrix::new(identity::<f64>(n) * cx(c, 0.0)).unwrap()
    }

    #[test]
    fn jordan_defects() {
        let b1 = defect(&jordan(), 1);
        assert_eq!(b1, CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0), cx(1.0, 0.0)]));
        let b2 = defect(&jordan(), 2);
        assert_eq!(b2, CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(2.0, 0.0)]));
        assert_eq!(max_abs(&defect(&jordan(), 3)), 0.0);
    }

    #[test]
    fn classification_examples() {
        let c = classify(&OperatorMatrix::<f64>::identity(3), 8, 1e-9).unwrap();
        assert_eq!(c.isometric_order, Some(1));
        let j = classify(&jordan(), 8, 1e-9).unwrap();
        assert_eq!(j.isometric_order, Some(3));
        assert!(!j.expansive, "β_1 of the Jordan block is indefinite");
        assert!(j.next_defect_consistent);
        let half = classify(&scalar_op(0.5, 2), 8, 1e-9).unwrap();
        assert!(!half.expansive && half.isometric_order.is_none());
        assert!(half.concave_orders.contains(&1));
    }

    #[test]
    fn left_inverse_and_dual() {
        let l = left_inverse(&jordan()).unwrap();
        assert!(max_abs(&(&l * jordan().matrix() - identity::<f64>(2))) < 1e-12);
        let u = OperatorMatrix::new(CMat::from_row_slice(2, 2, &[cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 1.0), cx(0.0, 0.0)]))
            .unwrap();
        assert!(max_abs(&(left_inverse(&u).unwrap() - u.adjoint())) < 1e-14);
        assert!(max_abs(&(cauchy_dual(&jordan()).unwrap() - l.adjoint())) < 1e-14);
        let sing = scalar_op(0.0, 2);
        assert!(matches!(left_inverse(&sing), Err(Error::NotLeftInvertible { .. })));
    }

    #[test]
    fn projection_identities() {
        let r = projection_residuals(&jordan(), 6).unwrap();
        assert!(r.iter().all(|&x| x < 1e-9), "{r:?}");
    }
}
