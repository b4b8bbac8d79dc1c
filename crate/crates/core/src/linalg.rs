//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};

use crate::error::{Error, Result};
use crate::scalar::{cabs, creal, czero, lit, to_f64, Cx, Real};

pub type CMat<T> = DMatrix<Cx<T>>;
pub type CVec<T> = DVector<Cx<T>>;

/// Absolute tolerance for the Hermitian check on stored matrices.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalue floor below which a matrix is not accepted as PSD.
pub const PSD_TOL: f64 = 1e-10;

pub fn identity<T: Real>(n: usize) -> CMat<T> {
    CMat::identity(n, n)
}

pub fn zeros<T: Real>(r: usize, c: usize) -> CMat<T> {
    CMat::from_element(r, c, czero())
}

/// Standard basis vector `e_i` of `C^dim`.
pub fn basis_vector<T: Real>(dim: usize, i: usize) -> CVec<T> {
    let mut e = CVec::from_element(dim, czero());
    e[i] = crate::scalar::cone();
    e
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMat<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)))
}

/// `max |m_ij - conj(m_ji)|`.
pub fn hermitian_deviation<T: Real>(m: &CMat<T>) -> T {
    assert!(m.is_square());
    let n = m.nrows();
    let mut dev = T::zero();
    for i in 0..n {
        for j in i..n {
            dev = dev.max(cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    dev
}

/// `(m + m*) / 2`.
pub fn hermitian_part<T: Real>(m: &CMat<T>) -> CMat<T> {
    let half = lit::<T>(0.5);
    (m + m.adjoint()).map(|z| z * half)
}

/// Eigenvalues in ascending order together with the matching eigenvectors as columns.
pub fn eigh<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn eigvalsh<T: Real>(m: &CMat<T>) -> Vec<T> {
    eigh(m).0
}

/// Smallest eigenvalue of the Hermitian part; `+inf`-like zero for empty matrices.
pub fn min_eigenvalue<T: Real>(m: &CMat<T>) -> T {
    eigvalsh(m).first().copied().unwrap_or_else(T::zero)
}

pub fn max_eigenvalue<T: Real>(m: &CMat<T>) -> T {
    eigvalsh(m).last().copied().unwrap_or_else(T::zero)
}

/// Operator 2-norm, `sqrt(λ_max(M*M))` on the smaller Gram matrix.
pub fn spectral_norm<T: Real>(m: &CMat<T>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    let g = if m.nrows() < m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    max_eigenvalue(&g).max(T::zero()).sqrt()
}

/// Eigen-decomposition of `[[0, M], [M*, 0]]`, whose eigenvalues are `±σ_i`
/// padded with zeros.
fn augmented_eigh<T: Real>(m: &CMat<T>) -> (Vec<T>, CMat<T>) {
    let (r, c) = m.shape();
    let mut h = zeros::<T>(r + c, r + c);
    h.view_mut((0, r), (r, c)).copy_from(m);
    h.view_mut((r, 0), (c, r)).copy_from(&m.adjoint());
    eigh(&h)
}

/// Orthonormal basis (as columns) of the column space of `m`, keeping singular
/// values above `rel_tol * sigma_max`.
pub fn range_basis<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let smax = spectral_norm(m);
    if smax == T::zero() {
        return zeros(m.nrows(), 0);
    }
    range_basis_cutoff(m, rel_tol * smax)
}

/// Orthonormal basis of the column space keeping singular values above `cutoff`.
pub fn range_basis_cutoff<T: Real>(m: &CMat<T>, cutoff: T) -> CMat<T> {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return zeros(r, 0);
    }
    let (vals, vecs) = augmented_eigh(m);
    let floor = T::default_epsilon() * lit::<T>(4.0 * (r + c) as f64) * vals[vals.len() - 1];
    let cutoff = cutoff.max(floor);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cutoff).collect();
    let mut out = zeros(r, keep.len());
    for (dst, &i) in keep.iter().enumerate() {
        let u = vecs.view((0, i), (r, 1)).into_owned();
        let nrm = u.norm();
        out.set_column(dst, &(u / creal(nrm)).column(0));
    }
    out
}

/// Eigenvalues of a square matrix from the diagonal of its complex Schur form.
pub fn eigenvalues<T: Real>(m: &CMat<T>) -> Vec<Cx<T>> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let (_, t) = Schur::new(m.clone()).unpack();
    t.diagonal().iter().copied().collect()
}

/// Orthonormal basis of the null space of `m`, spanning right singular
/// vectors with singular value at most `rel_tol * max(1, sigma_max)`.
pub fn null_basis<T: Real>(m: &CMat<T>, rel_tol: T) -> CMat<T> {
    let (r, c) = m.shape();
    if c == 0 {
        return zeros(0, 0);
    }
    let (vals, vecs) = augmented_eigh(m);
    let cutoff = rel_tol * vals[vals.len() - 1].max(T::one());
    let small: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= cutoff).collect();
    // The small eigenspace splits into left and right parts; project onto the right one.
    let mut low = zeros::<T>(c, small.len());
    for (dst, &i) in small.iter().enumerate() {
        low.set_column(dst, &vecs.view((r, i), (c, 1)).column(0));
    }
    let (pv, pvecs) = eigh(&(&low * low.adjoint()));
    let keep: Vec<usize> = (0..c).filter(|&i| pv[i] > lit(0.5)).collect();
    let mut out = zeros(c, keep.len());
    for (dst, &i) in keep.iter().enumerate() {
        out.set_column(dst, &pvecs.column(i));
    }
    out
}

/// Numerical rank with respect to `rel_tol * sigma_max`.
pub fn rank<T: Real>(m: &CMat<T>, rel_tol: T) -> usize {
    range_basis(m, rel_tol).ncols()
}

/// Solves `a x = b` for square invertible `a`.
pub fn solve<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Option<CMat<T>> {
    a.clone().lu().solve(b)
}

/// Inverse of a square matrix.
pub fn inverse<T: Real>(a: &CMat<T>) -> Option<CMat<T>> {
    a.clone().try_inverse()
}

/// `m^k` by repeated squaring.
pub fn matrix_power<T: Real>(m: &CMat<T>, k: usize) -> CMat<T> {
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    result
}

/// Least squares solution of `a x = b` for full column rank `a`, via QR.
pub fn lstsq_mat<T: Real>(a: &CMat<T>, b: &CMat<T>) -> Option<CMat<T>> {
    let (r, c) = a.shape();
    if r < c {
        return None;
    }
    let qr = a.clone().qr();
    let rr = qr.r();
    let top = rr.diagonal().iter().fold(T::zero(), |acc, z| acc.max(cabs(*z)));
    if rr.diagonal().iter().any(|z| cabs(*z) <= lit::<T>(1e-14) * top) {
        return None;
    }
    rr.solve_upper_triangular(&(qr.q().adjoint() * b))
}

/// Least squares solution of `a x = b` for full column rank `a`.
pub fn lstsq<T: Real>(a: &CMat<T>, b: &CVec<T>) -> Option<CVec<T>> {
    let bm = CMat::from_column_slice(b.len(), 1, b.as_slice());
    lstsq_mat(a, &bm).map(|x| CVec::from_column_slice(x.as_slice()))
}

/// A Hermitian matrix, symmetrized on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix<T: Real> {
    m: CMat<T>,
}

impl<T: Real> HermitianMatrix<T> {
    /// Validates Hermitian symmetry within [`HERMITIAN_TOL`] and stores the
    /// Hermitian part.
    pub fn new(m: CMat<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
        }
        let dev = hermitian_deviation(&m);
        if dev > lit(HERMITIAN_TOL) {
            return Err(Error::NonHermitianWeight { what: "matrix".into(), deviation: to_f64(dev) });
        }
        Ok(Self { m: hermitian_part(&m) })
    }

    /// Validates Hermitian symmetry and positive semidefiniteness.
    pub fn new_psd(m: CMat<T>) -> Result<Self> {
        let h = Self::new(m)?;
        let lo = h.min_eigenvalue();
        if lo < -lit::<T>(PSD_TOL) {
            return Err(Error::NonPsdWeight { what: "matrix".into(), eigenvalue: to_f64(lo) });
        }
        Ok(h)
    }

    pub fn identity(n: usize) -> Self {
        Self { m: identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { m: zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat<T> {
        &self.m
    }

    pub fn into_matrix(self) -> CMat<T> {
        self.m
    }

    pub fn min_eigenvalue(&self) -> T {
        min_eigenvalue(&self.m)
    }

    pub fn is_psd(&self, tol: T) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `<A x, x>` (real for Hermitian `A`).
    pub fn quadratic_form(&self, x: &CVec<T>) -> T {
        x.dotc(&(&self.m * x)).re
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn c(re: f64, im: f64) -> Cx<f64> {
        cx(re, im)
    }

    #[test]
    fn eigh_ascending() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let recon = &vecs * CMat::from_diagonal(&DVector::from_vec(vals.iter().map(|&v| c(v, 0.0)).collect())) * vecs.adjoint();
        assert!(max_abs(&(recon - m)) < 1e-13);
    }

    #[test]
    fn null_and_range_of_rank_one() {
        let v = CVec::from_vec(vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let m = &v * v.adjoint();
        assert_eq!(rank(&m, 1e-10), 1);
        let nb = null_basis(&m, 1e-10);
        assert_eq!(nb.ncols(), 2);
        assert!(max_abs(&(&m * &nb)) < 1e-12);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NonHermitianWeight { .. })));
    }

    #[test]
    fn power_matches_repeated_product() {
        let m = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let p = matrix_power(&m, 5);
        assert_eq!(p[(0, 1)], c(5.0, 0.0));
    }
}
