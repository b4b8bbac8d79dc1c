//! `E`-valued polynomials stored as dense coefficient sequences.

use crate::error::{Error, Result};
use crate::linalg::{CVec, HermitianMatrix, PSD_TOL};
use crate::scalar::{creal, czero, from_u64, lit, to_f64, Cx, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct VectorPolynomial<T: Real> {
    dim: usize,
    coeffs: Vec<CVec<T>>,
}

impl<T: Real> VectorPolynomial<T> {
    pub fn new(dim: usize, coeffs: Vec<CVec<T>>) -> Result<Self> {
        for c in &coeffs {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
            }
        }
        Ok(Self { dim, coeffs })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: Vec::new() }
    }

    /// `z^k e`.
    pub fn monomial(k: usize, e: CVec<T>) -> Self {
        let dim = e.len();
        let mut coeffs = vec![CVec::from_element(dim, czero()); k];
        coeffs.push(e);
        Self { dim, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[CVec<T>] {
        &self.coeffs
    }

    /// `f̂(k)`, zero past the stored length.
    pub fn coeff(&self, k: usize) -> CVec<T> {
        self.coeffs.get(k).cloned().unwrap_or_else(|| CVec::from_element(self.dim, czero()))
    }

    /// Number of stored coefficients.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest index with a nonzero coefficient, `-1` for the zero polynomial.
    pub fn degree(&self) -> i64 {
        self.coeffs
            .iter()
            .rposition(|c| c.iter().any(|z| *z != czero()))
            .map_or(-1, |k| k as i64)
    }

    pub fn is_zero(&self) -> bool {
        self.degree() < 0
    }

    /// Multiplication by `z`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero(self.dim);
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(CVec::from_element(self.dim, czero()));
        coeffs.extend(self.coeffs.iter().cloned());
        Self { dim: self.dim, coeffs }
    }

    /// `L f = (f - f(0)) / z`.
    pub fn lshift(&self) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().skip(1).cloned().collect() }
    }

    /// `L^k f`.
    pub fn lshift_pow(&self, k: usize) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().skip(k).cloned().collect() }
    }

    /// `f_r(z) = f(rz)`.
    pub fn dilate(&self, r: T) -> Result<Self> {
        if !(r > T::zero() && r <= T::one()) {
            return Err(Error::BadRadius { radius: to_f64(r) });
        }
        let mut rk = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let out = c * creal(rk);
                rk *= r;
                out
            })
            .collect();
        Ok(Self { dim: self.dim, coeffs })
    }

    /// `f^{(n)}`.
    pub fn derivative(&self, n: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(n)
            .map(|(j, c)| {
                let k = j - n;
                let falling = ((k + 1)..=j).fold(T::one(), |a, i| a * from_u64::<T>(i as u64));
                c * creal(falling)
            })
            .collect();
        Self { dim: self.dim, coeffs }
    }

    /// Horner evaluation at `z`.
    pub fn eval(&self, z: Cx<T>) -> CVec<T> {
        let mut acc = CVec::from_element(self.dim, czero());
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    /// Drops coefficients of index `> d`.
    pub fn truncate(&self, d: usize) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().take(d + 1).cloned().collect() }
    }

    pub fn scale(&self, a: Cx<T>) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: other.dim });
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        Ok(Self { dim: self.dim, coeffs: (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-creal(T::one())))
    }
}

/// `Σ_k <f̂(k), ĝ(k)>`, linear in `f`.
pub fn h2_inner<T: Real>(f: &VectorPolynomial<T>, g: &VectorPolynomial<T>) -> Result<Cx<T>> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: g.dim });
    }
    Ok(f.coeffs.iter().zip(&g.coeffs).fold(czero(), |a, (x, y)| a + y.dotc(x)))
}

pub fn h2_norm_sq<T: Real>(f: &VectorPolynomial<T>) -> T {
    f.coeffs.iter().fold(T::zero(), |a, c| a + c.norm_squared())
}

/// `Σ_k (k+1)^α <Q f̂(k), f̂(k)>`.
pub fn dalpha_norm_sq<T: Real>(f: &VectorPolynomial<T>, alpha: T, q: &HermitianMatrix<T>) -> Result<T> {
    if q.dim() != f.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, found: q.dim() });
    }
    let lo = q.min_eigenvalue();
    if lo < -lit::<T>(PSD_TOL) {
        return Err(Error::NonPsdQ { eigenvalue: to_f64(lo) });
    }
    Ok(f.coeffs.iter().enumerate().fold(T::zero(), |a, (k, c)| {
        a + from_u64::<T>(k as u64 + 1).powf(alpha) * q.quadratic_form(c)
    }))
}
