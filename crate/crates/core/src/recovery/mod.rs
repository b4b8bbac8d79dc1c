//! Moment recovery from pairings `<T^l x, T^j y>`, block-Toeplitz feasibility,
//! scalar atomic reconstruction and Gram round trips.
//!
//! Recovered moments use the same layout as measure moments: entry `[y][x]`
//! of `m(s)` is `<m(s) x, y>`, and `<A T^l x, T^j y> = <m(j - l) x, y>`.

mod atomic;

pub use atomic::{atomic_from_moments, ATOM_SEPARATION, RECONSTRUCTION_RESIDUAL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{max_abs, min_eigenvalue, null_basis, zeros, CMat};
use crate::measures::{block_toeplitz, check_unitary, MomentSequence, MomentSource, SemiSpectralMeasure};
use crate::operators::OperatorMatrix;
use crate::scalar::{binom, cabs, czero, lit, to_f64, Cx, Real};
use crate::spaces::{gram, gram_from_sources, GramModel, MeasureTuple};

/// Largest variation along a constant-difference diagonal, relative to the
/// largest pairing involved.
pub const DIAGONAL_TOL: f64 = 1e-9;
/// Block-Toeplitz PSD threshold relative to `max(1, |m(0)|)`.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Pairings `<T^l e_x, T^j e_y>` for `0 <= l, j <= degree` and basis vectors
/// `e_x, e_y` of the wandering subspace.
pub trait GramOracle<T: Real> {
    fn dim(&self) -> usize;
    fn degree(&self) -> usize;
    fn pairing(&self, l: usize, x: usize, j: usize, y: usize) -> Cx<T>;
}

impl<T: Real> GramOracle<T> for GramModel<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn pairing(&self, l: usize, x: usize, j: usize, y: usize) -> Cx<T> {
        GramModel::pairing(self, l, x, j, y)
    }
}

/// An operator matrix with a designated basis of `ker T*`.
#[derive(Debug, Clone)]
pub struct OperatorOracle<T: Real> {
    basis: CMat<T>,
    degree: usize,
    /// `(l·dim + x, j·dim + y) ↦ <T^l b_x, T^j b_y>`.
    table: CMat<T>,
}

impl<T: Real> OperatorOracle<T> {
    /// Uses `basis` when given, else an orthonormal basis of `ker T*`.
    pub fn new(t: &OperatorMatrix<T>, basis: Option<CMat<T>>, degree: usize) -> Result<Self> {
        let basis = match basis {
            Some(b) => b,
            None => null_basis(&t.adjoint(), lit(1e-10)),
        };
        if basis.nrows() != t.dim() {
            return Err(Error::DimensionMismatch { expected: t.dim(), found: basis.nrows() });
        }
        if basis.ncols() == 0 {
            return Err(Error::Precondition("kernel basis is empty".into()));
        }
        let k = basis.ncols();
        let mut orbit = Vec::with_capacity(degree + 1);
        let mut cur = basis.clone();
        for _ in 0..=degree {
            let next = t.matrix() * &cur;
            orbit.push(cur);
            cur = next;
        }
        let mut table = zeros((degree + 1) * k, (degree + 1) * k);
        for l in 0..=degree {
            for j in 0..=degree {
                // <u, v> = v* u
                let block = orbit[j].adjoint() * &orbit[l];
                for x in 0..k {
                    for y in 0..k {
                        table[(l * k + x, j * k + y)] = block[(y, x)];
                    }
                }
            }
        }
        Ok(Self { basis, degree, table })
    }

    pub fn basis(&self) -> &CMat<T> {
        &self.basis
    }

    pub fn table(&self) -> &CMat<T> {
        &self.table
    }
}

impl<T: Real> GramOracle<T> for OperatorOracle<T> {
    fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn degree(&self) -> usize {
        self.degree
    }

    fn pairing(&self, l: usize, x: usize, j: usize, y: usize) -> Cx<T> {
        let k = self.basis.ncols();
        self.table[(l * k + x, j * k + y)]
    }
}

/// `<β_r T^l e_x, T^j e_y> = Σ_i (-1)^{r-i} C(r,i) <T^{l+i} e_x, T^{j+i} e_y>`.
pub fn defect_pairing<T: Real>(o: &impl GramOracle<T>, r: usize, l: usize, x: usize, j: usize, y: usize) -> Cx<T> {
    let mut acc = czero();
    for i in 0..=r {
        let sign = if (r - i).is_multiple_of(2) { T::one() } else { -T::one() };
        acc += o.pairing(l + i, x, j + i, y) * (sign * binom::<T>(r as u64, i as u64));
    }
    acc
}

/// Largest pairing magnitude up to index `top`.
fn pairing_scale<T: Real>(o: &impl GramOracle<T>, top: usize) -> T {
    let k = o.dim();
    let mut s = T::one();
    for l in 0..=top {
        for j in 0..=top {
            for x in 0..k {
                for y in 0..k {
                    s = s.max(cabs(o.pairing(l, x, j, y)));
                }
            }
        }
    }
    s
}

/// Collects `value(l, j)` along every diagonal `j - l = s`, `|s| <= smax`,
/// `max(l, j) <= top`, checks constancy and returns the family `m(-smax..=smax)`
/// read at `min(l, j) = 0`.
fn diagonal_moments<T: Real>(
    dim: usize,
    smax: usize,
    top: usize,
    scale: T,
    tol: T,
    value: impl Fn(usize, usize, usize, usize) -> Cx<T>,
) -> Result<(Vec<CMat<T>>, T)> {
    let mut out = Vec::with_capacity(2 * smax + 1);
    let mut worst = T::zero();
    for s in -(smax as i64)..=smax as i64 {
        let (l0, j0) = if s >= 0 { (0, s as usize) } else { ((-s) as usize, 0) };
        let mut m = zeros::<T>(dim, dim);
        for x in 0..dim {
            for y in 0..dim {
                m[(y, x)] = value(l0, x, j0, y);
            }
        }
        let mut variation = T::zero();
        let mut step = 1;
        while l0 + step <= top && j0 + step <= top {
            for x in 0..dim {
                for y in 0..dim {
                    variation = variation.max(cabs(value(l0 + step, x, j0 + step, y) - m[(y, x)]));
                }
            }
            step += 1;
        }
        if variation > tol * scale {
            return Err(Error::DiagonalInconsistent { order: s, variation: to_f64(variation) });
        }
        worst = worst.max(variation);
        out.push(m);
    }
    Ok((out, worst))
}

/// Recovers `m_r(s)`, `|s| <= S`, from
/// `<β_r T^l x, T^j y> - Σ_{k=1}^{min(l,j)} <β_{r+1} T^{l-k} x, T^{j-k} y>`,
/// dropping the `β_m` terms.
///
/// The difference along each diagonal telescopes to a `β_m` pairing, so the
/// diagonal check runs on the `β_{m-1}` pairings, which are constant exactly
/// when `T*β_{m-1}T = β_{m-1}` on the orbit.
pub fn recover_moments<T: Real>(o: &impl GramOracle<T>, m: usize, r: usize, s: usize) -> Result<MomentSequence<T>> {
    if r < 1 || r + 1 > m {
        return Err(Error::Precondition(format!("need 1 ≤ r ≤ m-1, got r = {r}, m = {m}")));
    }
    let d = o.degree();
    if s + m > d {
        return Err(Error::TruncationTooShort(format!("order {s} needs degree ≥ {}, oracle has {d}", s + m)));
    }
    let top = d - (m - 1);
    let scale = pairing_scale(o, d) * binom::<T>(m as u64, m as u64 / 2);
    let tol = lit::<T>(DIAGONAL_TOL);
    let upper = |l: usize, x: usize, j: usize, y: usize| defect_pairing(o, m - 1, l, x, j, y);
    let (upper_moments, _) = diagonal_moments(o.dim(), s, top, scale, tol, upper)?;
    if r == m - 1 {
        return MomentSequence::new(o.dim(), upper_moments);
    }
    let value = |l: usize, x: usize, j: usize, y: usize| {
        let mut v = defect_pairing(o, r, l, x, j, y);
        for k in 1..=l.min(j) {
            v -= defect_pairing(o, r + 1, l - k, x, j - k, y);
        }
        v
    };
    let (full, _) = diagonal_moments(o.dim(), s, d - r, scale, tol, value)?;
    MomentSequence::new(o.dim(), full)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Feasibility {
    pub feasible: bool,
    pub min_eigenvalue: f64,
}

/// PSD verdict on the block-Toeplitz matrix with block `(k, l) = m(l - k)`, `k, l <= S`.
pub fn toeplitz_feasibility<T: Real>(seq: &MomentSequence<T>, s: usize) -> Result<Feasibility> {
    if s > seq.max_order() {
        return Err(Error::BadRange(format!("order {s} exceeds stored order {}", seq.max_order())));
    }
    let lo = min_eigenvalue(&block_toeplitz(seq, s));
    let scale = max_abs(&seq.moment(0)).max(T::one());
    Ok(Feasibility { feasible: lo >= -lit::<T>(FEASIBILITY_TOL) * scale, min_eigenvalue: to_f64(lo) })
}

/// Moment sequences recovered for `r = 1..m-1`.
#[derive(Debug, Clone)]
pub struct RecoveredTuple<T: Real> {
    pub m: usize,
    pub order: usize,
    pub sequences: Vec<MomentSequence<T>>,
    pub feasibility: Vec<Feasibility>,
    /// Scalar case only: one reconstruction per feasible sequence.
    pub atomic: Option<Vec<Result<SemiSpectralMeasure<T>>>>,
}

pub fn recover_tuple<T: Real>(o: &impl GramOracle<T>, m: usize, s: usize) -> Result<RecoveredTuple<T>> {
    let sequences = (1..m).map(|r| recover_moments(o, m, r, s)).collect::<Result<Vec<_>>>()?;
    let feasibility = sequences.iter().map(|q| toeplitz_feasibility(q, s)).collect::<Result<Vec<_>>>()?;
    let atomic = (o.dim() == 1).then(|| sequences.iter().map(|q| atomic_from_moments(q, s)).collect());
    Ok(RecoveredTuple { m, order: s, sequences, feasibility, atomic })
}

/// Outcome of [`roundtrip_verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub m: usize,
    #[serde(rename = "S")]
    pub s: usize,
    pub d: usize,
    /// Degree of the rebuilt Gram matrix.
    #[serde(rename = "gramDegree")]
    pub gram_degree: usize,
    #[serde(rename = "maxGramDeviation")]
    pub max_gram_deviation: f64,
    pub feasible: Vec<bool>,
    pub pass: bool,
    pub diagnostics: Vec<String>,
}

/// Recovers the moment sequences, rebuilds the Gram matrix of degree
/// `min(d - m - 1, S)` from them and compares with the oracle pairings.
pub fn roundtrip_verify<T: Real>(o: &impl GramOracle<T>, m: usize, s: usize, tol: T) -> Result<Certificate> {
    let d = o.degree();
    if m < 1 || d < m + 1 {
        return Err(Error::TruncationTooShort(format!("degree {d} leaves no room for m = {m}")));
    }
    let dim = o.dim();
    let mut diagnostics = vec![format!("margin: S = {s} ≤ d - m = {}", d - m)];
    let (sequences, feasible) = if m == 1 {
        (Vec::new(), Vec::new())
    } else {
        let rec = recover_tuple(o, m, s)?;
        let flags: Vec<bool> = rec.feasibility.iter().map(|f| f.feasible).collect();
        for (r, f) in rec.feasibility.iter().enumerate() {
            if !f.feasible {
                diagnostics.push(format!(
                    "InfeasibleSequence: r = {} block Toeplitz eigenvalue {:e}",
                    r + 1,
                    f.min_eigenvalue
                ));
            }
        }
        (rec.sequences, flags)
    };
    let gd = (d - m - 1).min(s);
    let rebuilt = gram_from_sources(&sequences, dim, gd);
    let mut dev = T::zero();
    for l in 0..=gd {
        for j in 0..=gd {
            for x in 0..dim {
                for y in 0..dim {
                    dev = dev.max(cabs(rebuilt[(l * dim + x, j * dim + y)] - o.pairing(l, x, j, y)));
                }
            }
        }
    }
    let within = dev <= tol;
    if !within {
        diagnostics.push(format!("Gram deviation {:e} exceeds {:e}", to_f64(dev), to_f64(tol)));
    }
    Ok(Certificate {
        m,
        s,
        d,
        gram_degree: gd,
        max_gram_deviation: to_f64(dev),
        pass: within && feasible.iter().all(|&f| f),
        feasible,
        diagnostics,
    })
}

/// Outcome of [`invariance_check`] and [`defect_invariance`].
#[derive(Debug, Clone)]
pub struct InvarianceReport<T: Real> {
    /// `|T*AT - A|_max`; zero for the oracle form.
    pub invariance_residual: T,
    pub min_eigenvalue: T,
    /// Largest variation along a constant-difference diagonal.
    pub max_variation: T,
    pub moments: MomentSequence<T>,
}

/// For positive `A` with `T*AT = A`, the pairings `<A T^l x, T^j y>` over
/// the columns of `basis` depend only on `j - l`.
pub fn invariance_check<T: Real>(
    a: &CMat<T>,
    t: &OperatorMatrix<T>,
    basis: &CMat<T>,
    d: usize,
    tol: T,
) -> Result<InvarianceReport<T>> {
    let n = t.dim();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.nrows() });
    }
    if basis.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis.nrows() });
    }
    let scale = max_abs(a).max(T::one());
    let res = max_abs(&(t.adjoint() * a * t.matrix() - a));
    if res > tol * scale {
        return Err(Error::NotInvariant { deviation: to_f64(res) });
    }
    let lo = min_eigenvalue(&crate::linalg::hermitian_part(a));
    if lo < -tol * scale {
        return Err(Error::NotPositive { eigenvalue: to_f64(lo) });
    }
    let k = basis.ncols();
    let mut orbit = Vec::with_capacity(d + 1);
    let mut cur = basis.clone();
    for _ in 0..=d {
        let next = t.matrix() * &cur;
        orbit.push(cur);
        cur = next;
    }
    let value = |l: usize, x: usize, j: usize, y: usize| orbit[j].column(y).dotc(&(a * orbit[l].column(x)));
    let mut big = T::one();
    for l in 0..=d {
        for j in 0..=d {
            for x in 0..k {
                for y in 0..k {
                    big = big.max(cabs(value(l, x, j, y)));
                }
            }
        }
    }
    let (full, worst) = diagonal_moments(k, d, d, big, tol, value)?;
    Ok(InvarianceReport {
        invariance_residual: res,
        min_eigenvalue: lo,
        max_variation: worst,
        moments: MomentSequence::new(k, full)?,
    })
}

/// Diagonal constancy of the `β_{m-1}` form over oracle pairings, the model
/// counterpart of [`invariance_check`] with `A = β_{m-1}(T)`.
pub fn defect_invariance<T: Real>(o: &impl GramOracle<T>, m: usize, tol: T) -> Result<InvarianceReport<T>> {
    if m < 2 {
        return Err(Error::Precondition("m must be at least 2".into()));
    }
    let r = m - 1;
    let d = o.degree();
    if d < r + 1 {
        return Err(Error::TruncationTooShort(format!("degree {d} below {}", r + 1)));
    }
    let top = d - r;
    let value = |l: usize, x: usize, j: usize, y: usize| defect_pairing(o, r, l, x, j, y);
    let scale = pairing_scale(o, d) * binom::<T>(r as u64, r as u64 / 2);
    let (full, worst) = diagonal_moments(o.dim(), top, top, scale, tol, value)?;
    let moments = MomentSequence::new(o.dim(), full)?;
    let lo = min_eigenvalue(&block_toeplitz(&moments, top));
    Ok(InvarianceReport { invariance_residual: T::zero(), min_eigenvalue: lo, max_variation: worst, moments })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub m: usize,
    pub order: usize,
    /// `max_{r,s} |m'_r(s) - V* m_r(s) V|`.
    pub conjugation_deviation: f64,
    /// `max_{r,s} |m_r(s) - μ_r^(s)|` for the unconjugated tuple.
    pub recovery_deviation: f64,
    pub pass: bool,
}

/// Recovers moments from `gram(𝛍, d)` and `gram(V*𝛍V, d)` at order `d - m`
/// and checks `m'_r(s) = V* m_r(s) V`.
pub fn uniqueness_check<T: Real>(tuple: &MeasureTuple<T>, v: &CMat<T>, d: usize, tol: T) -> Result<UniquenessReport> {
    check_unitary(v)?;
    let m = tuple.m();
    if d < m {
        return Err(Error::TruncationTooShort(format!("degree {d} below m = {m}")));
    }
    let s = d - m;
    let conj = tuple.conjugate(v)?;
    let g = gram(tuple, d);
    let gc = gram(&conj, d);
    let mut cdev = T::zero();
    let mut rdev = T::zero();
    for r in 1..m {
        let a = recover_moments(&g, m, r, s)?;
        let b = recover_moments(&gc, m, r, s)?;
        cdev = cdev.max(b.max_deviation(&a.conjugate(v)));
        rdev = rdev.max(a.max_deviation(&MomentSequence::from_source(tuple.measure(r), s)));
    }
    Ok(UniquenessReport {
        m,
        order: s,
        conjugation_deviation: to_f64(cdev),
        recovery_deviation: to_f64(rdev),
        pass: cdev <= tol && rdev <= tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, matrix_power};
    use crate::measures::{lebesgue, make_atomic};
    use crate::scalar::{cis, cx, creal};

    fn scalar(x: f64) -> CMat<f64> {
        CMat::from_element(1, 1, cx(x, 0.0))
    }

    fn seq(vals: &[f64]) -> MomentSequence<f64> {
        MomentSequence::from_nonnegative(1, vals.iter().map(|&v| scalar(v)).collect()).unwrap()
    }

    fn dirichlet_tuple() -> MeasureTuple<f64> {
        MeasureTuple::new(2, vec![lebesgue(1)]).unwrap()
    }

    fn atomic_tuple() -> MeasureTuple<f64> {
        let w = |a: f64, b: f64, c: f64| {
            CMat::from_row_slice(2, 2, &[cx(a, 0.0), cx(c, 0.3 * c), cx(c, -0.3 * c), cx(b, 0.0)])
        };
        let mu1 = make_atomic(2, vec![(0.4, w(1.0, 0.5, 0.2)), (2.5, w(0.3, 0.8, -0.1))]).unwrap();
        let mu2 = make_atomic(2, vec![(1.1, w(0.6, 0.4, 0.1)), (4.0, w(0.2, 0.9, 0.05)), (5.5, w(0.7, 0.7, 0.3))])
            .unwrap();
        MeasureTuple::new(3, vec![mu1, mu2]).unwrap()
    }

    #[test]
    fn dirichlet_shift_recovers_lebesgue() {
        let g = gram(&dirichlet_tuple(), 10);
        let q = recover_moments(&g, 2, 1, 8).unwrap();
        for s in -8..=8 {
            let want = if s == 0 { 1.0 } else { 0.0 };
            assert!((q.moment(s)[(0, 0)] - cx(want, 0.0)).norm() < 1e-12);
        }
        let cert = roundtrip_verify(&g, 2, 8, 1e-8).unwrap();
        assert!(cert.pass, "{cert:?}");
    }

    #[test]
    fn atomic_tuple_recovery_and_roundtrip() {
        let t = atomic_tuple();
        let g = gram(&t, 12);
        for r in 1..3 {
            let q = recover_moments(&g, 3, r, 9).unwrap();
            let want = MomentSequence::from_source(t.measure(r), 9);
            assert!(q.max_deviation(&want) < 1e-8);
            assert!(toeplitz_feasibility(&q, 9).unwrap().feasible);
        }
        let cert = roundtrip_verify(&g, 3, 9, 1e-8).unwrap();
        assert!(cert.pass && cert.feasible == vec![true, true], "{cert:?}");
        assert!(matches!(recover_moments(&g, 3, 1, 10), Err(Error::TruncationTooShort(_))));
        assert!(matches!(recover_moments(&g, 3, 3, 4), Err(Error::Precondition(_))));
    }

    #[test]
    fn unitary_model_gives_zero_moments() {
        let t = MeasureTuple::<f64>::new(3, vec![SemiSpectralMeasure::zero(2), SemiSpectralMeasure::zero(2)]).unwrap();
        let g = gram(&t, 8);
        for r in 1..3 {
            let q = recover_moments(&g, 3, r, 5).unwrap();
            assert!((0..=5).all(|s| max_abs(&q.moment(s)) < 1e-14));
        }
    }

    #[test]
    fn feasibility_examples() {
        let good = toeplitz_feasibility(&seq(&[1.0, 0.8]), 1).unwrap();
        assert!(good.feasible && (good.min_eigenvalue - 0.2).abs() < 1e-12);
        let bad = toeplitz_feasibility(&seq(&[1.0, 1.2]), 1).unwrap();
        assert!(!bad.feasible && (bad.min_eigenvalue + 0.2).abs() < 1e-12);
        let mu = make_atomic(1, vec![(0.3, scalar(0.5)), (2.0, scalar(1.5))]).unwrap();
        assert!(toeplitz_feasibility(&MomentSequence::from_source(&mu, 6), 6).unwrap().feasible);
    }

    #[test]
    fn indefinite_form_fails_roundtrip() {
        // Hand-built pairings with <β_1 z^l, z^j> = -1 on the diagonal: ‖z^k‖² = 1 - k.
        let d = 8;
        let mut m = zeros::<f64>(d + 1, d + 1);
        for k in 0..=d {
            m[(k, k)] = cx(1.0 - k as f64, 0.0);
        }
        let g = GramModel { dim: 1, degree: d, matrix: m };
        let cert = roundtrip_verify(&g, 2, 5, 1e-8).unwrap();
        assert!(!cert.pass && cert.feasible == vec![false]);
        assert!(cert.diagnostics.iter().any(|s| s.starts_with("InfeasibleSequence")));
    }

    #[test]
    fn invariance_of_unitary_with_identity() {
        let (c, s) = (0.6, 0.8);
        let u = CMat::from_row_slice(2, 2, &[cx(c, 0.0), cx(0.0, -s), cx(0.0, -s), cx(c, 0.0)]);
        let t = OperatorMatrix::new(u.clone()).unwrap();
        let rep = invariance_check(&identity::<f64>(2), &t, &identity(2), 5, 1e-10).unwrap();
        for sft in -5i64..=5 {
            // m(s)[y][x] = <x, U^s y> = (U^{-s})[y][x].
            let p = if sft >= 0 { matrix_power(&u.adjoint(), sft as usize) } else { matrix_power(&u, (-sft) as usize) };
            assert!(max_abs(&(rep.moments.moment(sft) - p)) < 1e-12);
        }
    }

    #[test]
    fn invariance_errors() {
        let t = OperatorMatrix::new(CMat::from_row_slice(2, 2, &[cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]))
            .unwrap();
        let a = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.2, 0.0), cx(0.2, 0.0), cx(1.0, 0.0)]);
        assert!(matches!(invariance_check(&a, &t, &identity(2), 3, 1e-10), Err(Error::NotInvariant { .. })));
        let u = OperatorMatrix::<f64>::identity(2);
        let neg = identity::<f64>(2) * creal(-1.0);
        assert!(matches!(invariance_check(&neg, &u, &identity(2), 3, 1e-10), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn defect_form_is_diagonal_constant_on_model() {
        let g = gram(&atomic_tuple(), 10);
        let rep = defect_invariance(&g, 3, 1e-9).unwrap();
        assert!(rep.max_variation < 1e-9);
        assert!(rep.min_eigenvalue > -1e-9);
        // Constant diagonal equals the top measure's moments.
        let want = MomentSequence::from_source(atomic_tuple().measure(2), 8);
        assert!(rep.moments.max_deviation(&want) < 1e-9);
    }

    #[test]
    fn jordan_operator_oracle() {
        let j = OperatorMatrix::new(CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]))
            .unwrap();
        assert!(matches!(OperatorOracle::new(&j, None, 6), Err(Error::Precondition(_))));
        let e1 = CMat::from_column_slice(2, 1, &[cx(0.0, 0.0), cx(1.0, 0.0)]);
        let o = OperatorOracle::new(&j, Some(e1), 6).unwrap();
        // <T^l e_1, T^j e_1> = lj + 1 gives m_1(s) = 1 + |s| and m_2(s) = 2.
        let q1 = recover_moments(&o, 3, 1, 3).unwrap();
        assert!((-3i64..=3).all(|s| (q1.moment(s)[(0, 0)] - cx(1.0 + s.abs() as f64, 0.0)).norm() < 1e-12));
        let cert = roundtrip_verify(&o, 3, 3, 1e-8).unwrap();
        assert_eq!(cert.feasible, vec![false, true]);
        assert!(!cert.pass);
        let b = CMat::from_column_slice(2, 1, &[cx(1.0, 0.0), cx(1.0, 0.0)]);
        let diag = CMat::from_row_slice(2, 2, &[cx(2.0, 0.0), cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0)]);
        let o = OperatorOracle::new(&OperatorMatrix::new(diag).unwrap(), Some(b), 6).unwrap();
        assert!(matches!(recover_moments(&o, 3, 1, 3), Err(Error::DiagonalInconsistent { .. })));
    }

    #[test]
    fn operator_oracle_matches_model_pairings() {
        // Truncated unilateral shift with ‖T^k e_0‖² = 1 + k: the Dirichlet shift.
        let n = 12;
        let mut m = zeros::<f64>(n, n);
        for k in 0..n - 1 {
            m[(k + 1, k)] = cx(((k as f64 + 2.0) / (k as f64 + 1.0)).sqrt(), 0.0);
        }
        let t = OperatorMatrix::new(m).unwrap();
        let o = OperatorOracle::new(&t, Some(CMat::from_fn(n, 1, |i, _| cx(if i == 0 { 1.0 } else { 0.0 }, 0.0))), 8)
            .unwrap();
        let q = recover_moments(&o, 2, 1, 6).unwrap();
        assert!((q.moment(0)[(0, 0)] - cx(1.0, 0.0)).norm() < 1e-12);
        assert!((1..=6).all(|s| q.moment(s)[(0, 0)].norm() < 1e-12));
    }

    #[test]
    fn uniqueness_examples() {
        let t = atomic_tuple();
        let rep = uniqueness_check(&t, &identity(2), 10, 1e-8).unwrap();
        assert!(rep.pass && rep.conjugation_deviation == 0.0);
        let (c, s) = (0.8, 0.6);
        let v = CMat::from_row_slice(2, 2, &[cx(c, 0.0), cis(0.7) * (-s), cx(s, 0.0), cis(0.7) * c]);
        let rep = uniqueness_check(&t, &v, 10, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
        let bad = identity::<f64>(2) * creal(2.0);
        assert!(matches!(uniqueness_check(&t, &bad, 10, 1e-8), Err(Error::NotUnitary { .. })));
        let mu = make_atomic(1, vec![(0.5, scalar(0.7))]).unwrap();
        let st = MeasureTuple::new(2, vec![mu]).unwrap();
        let rep = uniqueness_check(&st, &CMat::from_element(1, 1, cis(1.3)), 8, 1e-8).unwrap();
        assert!(rep.pass && rep.conjugation_deviation < 1e-14);
    }
}
