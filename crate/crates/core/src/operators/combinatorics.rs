use serde::Serialize;

use super::{defect, defects, power_gram, scaled_tol, OperatorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_eigenvalue, min_eigenvalue, CMat};
use crate::scalar::{binom, binomial, creal, to_f64, Real};

/// `Σ_{i=r}^{p-1} C(i-1, r-1)`, asserted equal to `C(p-1, r)`.
pub fn hockey_stick(p: u64, r: u64) -> Result<u128> {
    if r < 1 || p < 2 || r > p - 1 {
        return Err(Error::BadRange(format!("need 1 ≤ r ≤ p-1, got p = {p}, r = {r}")));
    }
    let sum: u128 = (r..p).map(|i| binomial(i - 1, r - 1)).sum();
    assert_eq!(sum, binomial(p - 1, r));
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcaveGrowthReport {
    pub m: usize,
    /// `(n, smallest eigenvalue of Σ_{j<m} C(n,j) β_j - T*^n T^n)`.
    pub rows: Vec<(usize, f64)>,
    pub beta_top_min_eigenvalue: f64,
    pub pass: bool,
}

/// `T*^n T^n ≤ Σ_{j=0}^{m-1} C(n,j) β_j(T)` for `n = m..=nmax`, and `β_{m-1} ≥ 0`.
pub fn concave_growth_check<T: Real>(t: &OperatorMatrix<T>, m: usize, nmax: usize, tol: T) -> Result<ConcaveGrowthReport> {
    if m == 0 {
        return Err(Error::Precondition("m must be positive".into()));
    }
    let betas = defects(t, m);
    if max_eigenvalue(&betas[m]) > scaled_tol(t, m, tol) {
        return Err(Error::Precondition(format!("operator is not {m}-concave")));
    }
    let mut rows = Vec::new();
    let mut pass = true;
    for n in m..=nmax {
        let mut bound = CMat::zeros(t.dim(), t.dim());
        for (j, b) in betas.iter().enumerate().take(m) {
            bound += b * creal(binom::<T>(n as u64, j as u64));
        }
        let g = power_gram(t, n);
        let scale = max_abs(&g).max(max_abs(&bound)).max(T::one());
        let lo = min_eigenvalue(&(bound - g));
        pass &= lo >= -tol * scale;
        rows.push((n, to_f64(lo)));
    }
    let top = min_eigenvalue(&betas[m - 1]);
    pass &= top >= -scaled_tol(t, m - 1, tol);
    Ok(ConcaveGrowthReport { m, rows, beta_top_min_eigenvalue: to_f64(top), pass })
}

/// Unilateral weighted shift `T e_n = w_n e_{n+1}` truncated to `S+1` dimensions.
pub fn weighted_shift_matrix<T: Real>(weights: &[T], s: usize) -> Result<CMat<T>> {
    if weights.len() < s {
        return Err(Error::TruncationTooShort(format!("{} weights for truncation {s}", weights.len())));
    }
    let mut m = CMat::zeros(s + 1, s + 1);
    for n in 0..s {
        m[(n + 1, n)] = creal(weights[n]);
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedShiftReport {
    pub m: usize,
    pub truncation: usize,
    /// Indices `0..=window` are free of truncation artifacts.
    pub window: usize,
    /// `β_r ≥ Σ_k L*^k β_{r+1} L^k` for `r = 1..m-2` on the window.
    pub inequality_verdict: bool,
    /// `β_r ≥ 0` for `r = 1..m-2` on the window.
    pub positivity_verdict: bool,
    /// `β_m ≤ 0` on the window.
    pub concave: bool,
    pub agree: bool,
    /// Agreement is required only for `m`-concave shifts.
    pub pass: bool,
}

pub fn weighted_shift_equivalence<T: Real>(weights: &[T], m: usize, s: usize, tol: T) -> Result<WeightedShiftReport> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    if s < m + 1 {
        return Err(Error::TruncationTooShort(format!("truncation {s} leaves no window for m = {m}")));
    }
    if weights.iter().take(s).any(|w| *w == T::zero()) {
        return Err(Error::Precondition("weights must be nonzero".into()));
    }
    let t = OperatorMatrix::new(weighted_shift_matrix(weights, s)?)?;
    let window = s - m;
    let w = window + 1;
    let betas = defects(&t, m);
    // Backward shift L e_{n+1} = e_n / w_n, the left inverse of the full shift.
    let mut l = CMat::zeros(s + 1, s + 1);
    for n in 0..s {
        l[(n, n + 1)] = creal(T::one() / weights[n]);
    }
    let sub = |a: &CMat<T>| a.view((0, 0), (w, w)).into_owned();
    let thr = |b: &CMat<T>| tol * max_abs(&sub(b)).max(T::one());
    let mut inequality_verdict = true;
    let mut positivity_verdict = true;
    for r in 1..=m.saturating_sub(2) {
        let mut lk = crate::linalg::identity::<T>(s + 1);
        let mut series = CMat::zeros(s + 1, s + 1);
        for _ in 1..=window {
            lk = &lk * &l;
            series += lk.adjoint() * &betas[r + 1] * &lk;
        }
        let x = &betas[r] - series;
        inequality_verdict &= min_eigenvalue(&sub(&x)) >= -thr(&x);
        positivity_verdict &= min_eigenvalue(&sub(&betas[r])) >= -thr(&betas[r]);
    }
    let concave = max_eigenvalue(&sub(&betas[m])) <= thr(&betas[m]);
    let agree = inequality_verdict == positivity_verdict;
    Ok(WeightedShiftReport {
        m,
        truncation: s,
        window,
        inequality_verdict,
        positivity_verdict,
        concave,
        agree,
        pass: agree || !concave,
    })
}

/// `‖β_{m+1} - (T*β_m T - β_m)‖_max`.
pub fn recursion_residual<T: Real>(t: &OperatorMatrix<T>, m: usize) -> T {
    let bm = defect(t, m);
    let next = defect(t, m + 1);
    max_abs(&(next - (t.adjoint() * &bm * t.matrix() - &bm)))
}
