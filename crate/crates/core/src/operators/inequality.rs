use serde::Serialize;

use super::{defect, defects, left_inverse, scaled_tol, OperatorMatrix};
use crate::error::{Error, Result};
use crate::linalg::{identity, max_abs, max_eigenvalue, min_eigenvalue, spectral_norm, CMat, HermitianMatrix};
use crate::polynomials::VectorPolynomial;
use crate::scalar::{binom, creal, lit, to_f64, Real};
use crate::spaces::{defect_form, inequality_form, MeasureTuple};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// One `r` of `β_r ≥ Σ_{k≥1} L*^k β_{r+1} L^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRow {
    pub r: usize,
    pub terms: usize,
    pub last_increment: f64,
    pub converged: bool,
    /// Smallest eigenvalue of `β_r - S_K`.
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
    pub error: Option<String>,
}

/// `Ψ(r) = Σ_{k≥r+1} C(k-1, r) L*^k β_{r+1} L^k ≤ I`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiRow {
    pub r: usize,
    pub last_increment: f64,
    pub converged: bool,
    /// Smallest eigenvalue of `I - Ψ(r)`.
    pub min_eigenvalue: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub m: usize,
    pub vacuous: bool,
    pub rows: Vec<InequalityRow>,
    pub psi: Vec<PsiRow>,
    pub verdict: Verdict,
}

fn combine(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
    let mut out = Verdict::Pass;
    for v in vs {
        match v {
            Verdict::Fail => return Verdict::Fail,
            Verdict::Inconclusive => out = Verdict::Inconclusive,
            Verdict::Pass => {}
        }
    }
    out
}

/// `Σ_{k=from}^{K} w_k L*^k B L^k` with the norm of the last term.
fn weighted_series<T: Real>(l: &CMat<T>, b: &CMat<T>, from: usize, terms: usize, w: impl Fn(usize) -> T) -> (CMat<T>, T) {
    let n = l.nrows();
    let mut lk = identity::<T>(n);
    let mut sum = CMat::zeros(n, n);
    let mut last = T::zero();
    for k in 1..=terms {
        lk = &lk * l;
        if k < from {
            continue;
        }
        let term = lk.adjoint() * b * &lk * creal(w(k));
        last = spectral_norm(&term);
        sum += term;
    }
    (sum, last)
}

/// Checks the model inequalities for `r = 1..m-2` with partial sums up to `K`
/// terms, plus the `Ψ(r) ≤ I` bounds for `r = 0..m-2`.
pub fn inequality_check<T: Real>(t: &OperatorMatrix<T>, m: usize, terms: usize, tol: T) -> Result<InequalityReport> {
    let l = left_inverse(t)?;
    if m <= 2 {
        return Ok(InequalityReport { m, vacuous: true, rows: Vec::new(), psi: Vec::new(), verdict: Verdict::Pass });
    }
    let betas = defects(t, m);
    let mut rows = Vec::new();
    for r in 1..=m - 2 {
        let (s, last) = weighted_series(&l, &betas[r + 1], 1, terms, |_| T::one());
        let inc_tol = tol * spectral_norm(&betas[r + 1]).max(T::one());
        let converged = last <= inc_tol;
        let lo = min_eigenvalue(&(&betas[r] - s));
        let verdict = if !converged {
            Verdict::Inconclusive
        } else if lo >= -scaled_tol(t, r + 1, tol) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let error = (!converged).then(|| Error::SeriesNotConverged { increment: to_f64(last), terms }.to_string());
        rows.push(InequalityRow {
            r,
            terms,
            last_increment: to_f64(last),
            converged,
            min_eigenvalue: to_f64(lo),
            verdict,
            error,
        });
    }
    let mut psi = Vec::new();
    for r in 0..=m - 2 {
        let (s, last) = weighted_series(&l, &betas[r + 1], r + 1, terms, |k| binom::<T>(k as u64 - 1, r as u64));
        let converged = last <= tol * spectral_norm(&betas[r + 1]).max(T::one());
        let lo = min_eigenvalue(&(identity::<T>(t.dim()) - s));
        let verdict = if !converged {
            Verdict::Inconclusive
        } else if lo >= -scaled_tol(t, r + 1, tol) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        psi.push(PsiRow { r, last_increment: to_f64(last), converged, min_eigenvalue: to_f64(lo), verdict });
    }
    let verdict = combine(rows.iter().map(|r| r.verdict));
    Ok(InequalityReport { m, vacuous: false, rows, psi, verdict })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShimorinReport {
    /// `β_2 ≤ β_1 - L*β_1 L` within tolerance.
    pub transformed_holds: bool,
    /// Largest eigenvalue of `β_2 - β_1 + L*β_1 L`.
    pub transformed_max_eigenvalue: f64,
    /// `‖(β_2 - β_1 + L*β_1L) - (T*²T² - 3T*T + 3I - L*L - P)‖`, with `P` the projection onto `ker T*`.
    pub identity_residual: f64,
    /// Largest eigenvalue of `β_3`.
    pub beta3_max_eigenvalue: f64,
    pub expansive: bool,
    /// Smallest eigenvalue of `β_1 - L*^{K+1}β_1 L^{K+1} - Σ_{k=0}^{K} L*^k β_2 L^k` over `K ≤ terms`.
    pub telescoping_partial_min_eigenvalue: f64,
    /// Smallest eigenvalue of `β_1 - Σ_{k=0}^{K} L*^k β_2 L^k` over `K ≤ terms`.
    pub telescoping_min_eigenvalue: f64,
    /// The transformed inequality forces `β_3 ≤ 0` and the partial telescoping
    /// bound; for expansive `T` also the full bound by `β_1`.
    pub implication_consistent: bool,
}

pub fn shimorin_check<T: Real>(t: &OperatorMatrix<T>, terms: usize, tol: T) -> Result<ShimorinReport> {
    let l = left_inverse(t)?;
    let n = t.dim();
    let id = identity::<T>(n);
    let b1 = defect(t, 1);
    let b2 = defect(t, 2);
    let b3 = defect(t, 3);
    let x = &b2 - &b1 + l.adjoint() * &b1 * &l;
    let top = max_eigenvalue(&x);
    let transformed_holds = top <= scaled_tol(t, 2, tol);
    let tt = t.gram();
    let t2 = crate::linalg::matrix_power(t.matrix(), 2);
    let p = &id - t.matrix() * &l;
    let original = t2.adjoint() * &t2 - &tt * creal(lit::<T>(3.0)) + &id * creal(lit::<T>(3.0)) - l.adjoint() * &l - &p;
    let identity_residual = max_abs(&(&x - original));
    let beta3_top = max_eigenvalue(&b3);
    let expansive = min_eigenvalue(&b1) >= -scaled_tol(t, 1, tol);
    let mut lk = identity::<T>(n);
    let mut sum = CMat::zeros(n, n);
    let mut tele_mid = T::max_value().unwrap_or_else(T::one);
    let mut tele = T::max_value().unwrap_or_else(T::one);
    for _ in 0..=terms {
        sum += lk.adjoint() * &b2 * &lk;
        lk = &lk * &l;
        let tail = lk.adjoint() * &b1 * &lk;
        tele_mid = tele_mid.min(min_eigenvalue(&(&b1 - &tail - &sum)));
        tele = tele.min(min_eigenvalue(&(&b1 - &sum)));
    }
    let slack = scaled_tol(t, 2, tol) * lit(terms as f64 + 1.0);
    let implication_consistent = !transformed_holds
        || (beta3_top <= scaled_tol(t, 3, tol) && tele_mid >= -slack && (!expansive || tele >= -slack));
    Ok(ShimorinReport {
        transformed_holds,
        transformed_max_eigenvalue: to_f64(top),
        identity_residual: to_f64(identity_residual),
        beta3_max_eigenvalue: to_f64(beta3_top),
        expansive,
        telescoping_partial_min_eigenvalue: to_f64(tele_mid),
        telescoping_min_eigenvalue: to_f64(tele),
        implication_consistent,
    })
}

/// The transformed Shimorin inequality on constants in the model space
/// (it reduces to `μ_2(T) ≤ μ_1(T)`), next to the model inequality forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShimorinModelReport {
    /// Smallest eigenvalue of `[<β_1 e_j, e_i>] - [<β_2 e_j, e_i>]`.
    pub constant_gap_min_eigenvalue: f64,
    pub shimorin_holds: bool,
    /// Smallest `Q_1(f)` over the sample polynomials.
    pub inequality_min: f64,
    pub inequality_holds: bool,
}

pub fn shimorin_model_check<T: Real>(
    tuple: &MeasureTuple<T>,
    samples: &[VectorPolynomial<T>],
    tol: T,
) -> Result<ShimorinModelReport> {
    if tuple.m() != 3 {
        return Err(Error::Precondition(format!("model Shimorin check needs m = 3, got {}", tuple.m())));
    }
    let d = tuple.dim();
    let form = |r: usize| -> Result<CMat<T>> {
        let mut b = CMat::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let ei = VectorPolynomial::monomial(0, crate::linalg::basis_vector(d, i));
                let ej = VectorPolynomial::monomial(0, crate::linalg::basis_vector(d, j));
                b[(i, j)] = defect_form(tuple, r, &ej, &ei)?;
            }
        }
        Ok(b)
    };
    let gap = HermitianMatrix::new(crate::linalg::hermitian_part(&(form(1)? - form(2)?)))?.min_eigenvalue();
    let mut qmin = T::max_value().unwrap_or_else(T::one);
    for f in samples {
        qmin = qmin.min(inequality_form(tuple, 1, f)?.value);
    }
    Ok(ShimorinModelReport {
        constant_gap_min_eigenvalue: to_f64(gap),
        shimorin_holds: gap >= -tol,
        inequality_min: to_f64(qmin),
        inequality_holds: qmin >= -tol,
    })
}
