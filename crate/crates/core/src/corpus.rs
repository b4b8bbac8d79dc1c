//! Seeded generators for measures, polynomials, unitaries, tuples and
//! m-isometric matrices.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{hermitian_part, identity, zeros, CMat, CVec};
use crate::measures::{make_atomic, make_trig, SemiSpectralMeasure};
use crate::operators::OperatorMatrix;
use crate::polynomials::VectorPolynomial;
use crate::scalar::{cis, creal, cx, lit, Cx, Real};
use crate::spaces::MeasureTuple;

/// A deterministic stream of test objects.
pub struct Corpus {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Self { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn complex<T: Real>(&mut self) -> Cx<T> {
        let (a, b) = (self.normal(), self.normal());
        cx(lit(a), lit(b))
    }

    pub fn gaussian_matrix<T: Real>(&mut self, rows: usize, cols: usize) -> CMat<T> {
        let mut m = zeros(rows, cols);
        for j in 0..cols {
            for i in 0..rows {
                m[(i, j)] = self.complex();
            }
        }
        m
    }

    /// Haar-like unitary from the QR factor of a Gaussian matrix with phases fixed.
    pub fn unitary<T: Real>(&mut self, dim: usize) -> CMat<T> {
        let qr = self.gaussian_matrix::<T>(dim, dim).qr();
        let (q, r) = (qr.q(), qr.r());
        let mut out = q;
        for j in 0..dim {
            let d = r[(j, j)];
            let n = d.norm_sqr().sqrt();
            if n > T::zero() {
                let phase = d / creal(n);
                for i in 0..dim {
                    out[(i, j)] *= phase;
                }
            }
        }
        out
    }

    /// `G G* / dim` with a Gaussian `G`, scaled into `[0.2, 1.2]` trace per dimension.
    pub fn psd<T: Real>(&mut self, dim: usize) -> CMat<T> {
        let g = self.gaussian_matrix::<T>(dim, dim);
        let a = hermitian_part(&(&g * g.adjoint()));
        let tr = (0..dim).fold(T::zero(), |s, i| s + a[(i, i)].re);
        let target = lit::<T>(self.uniform(0.2, 1.2) * dim as f64);
        a * creal(target / tr)
    }

    pub fn atomic<T: Real>(&mut self, dim: usize, atoms: usize) -> SemiSpectralMeasure<T> {
        let list = (0..atoms)
            .map(|_| {
                let th = lit::<T>(self.uniform(0.0, std::f64::consts::TAU));
                (th, self.psd::<T>(dim))
            })
            .collect();
        make_atomic(dim, list).expect("generated weights are PSD")
    }

    /// Scalar atoms with pairwise circular separation at least `min_sep`,
    /// sorted by angle, masses in `[0.1, 1]`.
    pub fn separated_scalar_atoms(&mut self, atoms: usize, min_sep: f64) -> Vec<(f64, f64)> {
        loop {
            let mut angles: Vec<f64> = (0..atoms).map(|_| self.uniform(0.0, std::f64::consts::TAU)).collect();
            angles.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
            let ok = atoms < 2
                || (angles.windows(2).all(|w| w[1] - w[0] >= min_sep)
                    && angles[0] + std::f64::consts::TAU - angles[atoms - 1] >= min_sep);
            if ok {
                return angles.into_iter().map(|a| (a, self.uniform(0.1, 1.0))).collect();
            }
        }
    }

    /// Density `Q(ζ)*Q(ζ) + εI` with `Q` a random matrix polynomial of the given degree.
    pub fn trig<T: Real>(&mut self, dim: usize, degree: usize) -> SemiSpectralMeasure<T> {
        let scale = creal(lit::<T>(1.0 / ((degree + 1) as f64 * dim as f64).sqrt()));
        let b: Vec<CMat<T>> = (0..=degree).map(|_| self.gaussian_matrix::<T>(dim, dim) * scale).collect();
        let mut coeffs = BTreeMap::new();
        for s in -(degree as i64)..=degree as i64 {
            let mut c = zeros::<T>(dim, dim);
            for k in 0..=degree as i64 {
                let l = k + s;
                if (0..=degree as i64).contains(&l) {
                    c += b[k as usize].adjoint() * &b[l as usize];
                }
            }
            coeffs.insert(s, c);
        }
        let eps = lit::<T>(self.uniform(0.05, 0.3));
        *coeffs.get_mut(&0).expect("zero coefficient") += identity::<T>(dim) * creal(eps);
        let c0 = hermitian_part(&coeffs[&0]);
        coeffs.insert(0, c0);
        make_trig(dim, coeffs).expect("generated density is PSD")
    }

    /// Atomic with 1..=4 atoms three times out of four, otherwise a degree-≤2 density.
    pub fn measure<T: Real>(&mut self, dim: usize) -> SemiSpectralMeasure<T> {
        if self.index(0, 3) < 3 {
            let atoms = self.index(1, 4);
            self.atomic(dim, atoms)
        } else {
            let deg = self.index(0, 2);
            self.trig(dim, deg)
        }
    }

    pub fn polynomial<T: Real>(&mut self, dim: usize, degree: usize) -> VectorPolynomial<T> {
        let coeffs = (0..=degree).map(|_| CVec::from_iterator(dim, (0..dim).map(|_| self.complex()))).collect();
        VectorPolynomial::new(dim, coeffs).expect("consistent dimensions")
    }

    pub fn tuple<T: Real>(&mut self, m: usize, dim: usize, atomic: bool) -> MeasureTuple<T> {
        let ms = (1..m)
            .map(|_| {
                if atomic {
                    let atoms = self.index(1, 4);
                    self.atomic(dim, atoms)
                } else {
                    self.measure(dim)
                }
            })
            .collect();
        MeasureTuple::new(m, ms).expect("consistent tuple")
    }

    /// `W* (⊕ λ_i (I + c_i N)) W` with unimodular `λ_i`, Jordan sizes at most
    /// `max_block` and a random unitary `W`. Returns the matrix and its
    /// isometric order `2·(largest block) − 1`.
    pub fn m_isometry<T: Real>(&mut self, dim: usize, max_block: usize) -> (OperatorMatrix<T>, usize) {
        let mut b = zeros::<T>(dim, dim);
        let mut at = 0;
        let mut largest = 1;
        while at < dim {
            let size = self.index(1, max_block.min(dim - at));
            largest = largest.max(size);
            let lam = cis(lit::<T>(self.uniform(0.0, std::f64::consts::TAU)));
            let c = lit::<T>(self.uniform(0.5, 1.5));
            for i in 0..size {
                b[(at + i, at + i)] = lam;
                if i + 1 < size {
                    b[(at + i, at + i + 1)] = lam * creal(c);
                }
            }
            at += size;
        }
        let w = self.unitary::<T>(dim);
        let t = OperatorMatrix::new(w.adjoint() * b * &w).expect("finite entries");
        (t, 2 * largest - 1)
    }

    /// A contraction `c·U` with `c ∈ [0.3, 1)`: 1-concave.
    pub fn contraction<T: Real>(&mut self, dim: usize) -> OperatorMatrix<T> {
        let c = lit::<T>(self.uniform(0.3, 1.0));
        OperatorMatrix::new(self.unitary::<T>(dim) * creal(c)).expect("finite entries")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::operators::defect;

    #[test]
    fn seeded_streams_repeat() {
        let a: CMat<f64> = Corpus::new(7).unitary(3);
        let b: CMat<f64> = Corpus::new(7).unitary(3);
        assert_eq!(a, b);
        assert!(max_abs(&(a.adjoint() * &a - identity::<f64>(3))) < 1e-12);
    }

    #[test]
    fn m_isometries_have_stated_order() {
        let mut c = Corpus::new(11);
        for _ in 0..10 {
            let (t, m) = c.m_isometry::<f64>(4, 3);
            let scale = (1.0 + t.norm().powi(2)).powi(m as i32);
            assert!(max_abs(&defect(&t, m)) < 1e-9 * scale);
            if m > 1 {
                assert!(max_abs(&defect(&t, m - 1)) > 1e-6);
            }
        }
    }

    #[test]
    fn generated_measures_validate() {
        let mut c = Corpus::new(3);
        for dim in 1..=3 {
            let _ = c.trig::<f64>(dim, 2);
            let _ = c.atomic::<f64>(dim, 4);
        }
        let atoms = c.separated_scalar_atoms(4, 1e-2);
        assert_eq!(atoms.len(), 4);
    }
}
