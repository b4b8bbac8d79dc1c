//! The model space `H_𝛍(E)` on polynomials.
//!
//! Operators on the model space (the shift `M_z`, its defects) only ever
//! appear as sesquilinear forms evaluated on polynomials.

use crate::dirichlet::{dirichlet_form, dirichlet_norm_sq};
use crate::error::{Error, Result};
use crate::linalg::{rank, zeros, CMat, CVec};
use crate::measures::{MomentSource, SemiSpectralMeasure};
use crate::polynomials::{h2_inner, VectorPolynomial};
use crate::scalar::{binom, creal, czero, lit, pairwise_sum, Cx, Real};

/// `𝛍 = (μ_1, …, μ_{m-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureTuple<T: Real> {
    m: usize,
    measures: Vec<SemiSpectralMeasure<T>>,
}

impl<T: Real> MeasureTuple<T> {
    pub fn new(m: usize, measures: Vec<SemiSpectralMeasure<T>>) -> Result<Self> {
        if m < 2 {
            return Err(Error::Precondition(format!("m = {m} must be at least 2")));
        }
        if measures.len() != m - 1 {
            return Err(Error::DimensionMismatch { expected: m - 1, found: measures.len() });
        }
        let d = measures[0].dim();
        for mu in &measures {
            if mu.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: mu.dim() });
            }
        }
        Ok(Self { m, measures })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.measures[0].dim()
    }

    pub fn measures(&self) -> &[SemiSpectralMeasure<T>] {
        &self.measures
    }

    /// `μ_r` for `1 ≤ r ≤ m-1`.
    pub fn measure(&self, r: usize) -> &SemiSpectralMeasure<T> {
        &self.measures[r - 1]
    }

    /// `(V*μ_1V, …, V*μ_{m-1}V)`.
    pub fn conjugate(&self, v: &CMat<T>) -> Result<Self> {
        let measures = self.measures.iter().map(|mu| mu.conjugate(v)).collect::<Result<_>>()?;
        Ok(Self { m: self.m, measures })
    }
}

/// `<f, g>_𝛍 = <f, g>_{H²} + Σ_j D_{μ_j,j}(f, g)`.
pub fn tuple_inner<T: Real>(tuple: &MeasureTuple<T>, f: &VectorPolynomial<T>, g: &VectorPolynomial<T>) -> Result<Cx<T>> {
    let mut acc = h2_inner(f, g)?;
    for (j, mu) in tuple.measures.iter().enumerate() {
        acc += dirichlet_form(mu, j + 1, f, g)?;
    }
    Ok(acc)
}

pub fn tuple_norm_sq<T: Real>(tuple: &MeasureTuple<T>, f: &VectorPolynomial<T>) -> Result<T> {
    Ok(tuple_inner(tuple, f, f)?.re)
}

/// Gram matrix of `{z^k e_i : k ≤ d}` with row/column index `k·dimE + i`.
///
/// Entry `(k·dimE + i, l·dimE + j)` is `<z^k e_i, z^l e_j>_𝛍`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramModel<T: Real> {
    pub dim: usize,
    pub degree: usize,
    pub matrix: CMat<T>,
}

impl<T: Real> GramModel<T> {
    /// `<z^k e_i, z^l e_j>_𝛍`.
    pub fn pairing(&self, k: usize, i: usize, l: usize, j: usize) -> Cx<T> {
        self.matrix[(k * self.dim + i, l * self.dim + j)]
    }

    /// `<z^k x, z^l y>_𝛍` for vectors `x, y ∈ E`.
    pub fn vector_pairing(&self, k: usize, x: &CVec<T>, l: usize, y: &CVec<T>) -> Cx<T> {
        let d = self.dim;
        let block = self.matrix.view((k * d, l * d), (d, d));
        // Σ_{i,j} x_i conj(y_j) G[(k,i),(l,j)]
        let mut acc = czero();
        for i in 0..d {
            for j in 0..d {
                acc += x[i] * y[j].conj() * block[(i, j)];
            }
        }
        acc
    }
}

/// Closed-form Gram entries `δ + Σ_r C(k∧l, r) m_r(l-k)[j][i]` built from
/// arbitrary moment sources.
pub fn gram_from_sources<T: Real, M: MomentSource<T>>(sources: &[M], dim: usize, d: usize) -> CMat<T> {
    let n = (d + 1) * dim;
    let mut g = zeros(n, n);
    let moments: Vec<Vec<CMat<T>>> =
        sources.iter().map(|s| (-(d as i64)..=d as i64).map(|j| s.moment(j)).collect()).collect();
    for k in 0..=d {
        for l in 0..=d {
            let mut block = if k == l { CMat::identity(dim, dim) } else { zeros(dim, dim) };
            for (ri, ms) in moments.iter().enumerate() {
                let r = ri as u64 + 1;
                let w = binom::<T>(k.min(l) as u64, r);
                if w == T::zero() {
                    continue;
                }
                block += ms[(l as i64 - k as i64 + d as i64) as usize].transpose() * creal(w);
            }
            g.view_mut((k * dim, l * dim), (dim, dim)).copy_from(&block);
        }
    }
    g
}

pub fn gram<T: Real>(tuple: &MeasureTuple<T>, d: usize) -> GramModel<T> {
    GramModel { dim: tuple.dim(), degree: d, matrix: gram_from_sources(&tuple.measures, tuple.dim(), d) }
}

/// `<β_r(M_z) f, g>_𝛍 = Σ_j (-1)^{r-j} C(r,j) <z^j f, z^j g>_𝛍`.
pub fn defect_form<T: Real>(
    tuple: &MeasureTuple<T>,
    r: usize,
    f: &VectorPolynomial<T>,
    g: &VectorPolynomial<T>,
) -> Result<Cx<T>> {
    let mut terms = Vec::with_capacity(r + 1);
    let (mut zf, mut zg) = (f.clone(), g.clone());
    for j in 0..=r {
        let sign = if (r - j).is_multiple_of(2) { T::one() } else { -T::one() };
        terms.push(tuple_inner(tuple, &zf, &zg)? * creal(sign * binom::<T>(r as u64, j as u64)));
        zf = zf.shift();
        zg = zg.shift();
    }
    Ok(pairwise_sum(&terms))
}

/// Largest absolute term of the defect alternating sum; the natural noise scale.
pub fn defect_scale<T: Real>(tuple: &MeasureTuple<T>, r: usize, f: &VectorPolynomial<T>) -> Result<T> {
    let mut zf = f.clone();
    let mut scale = T::zero();
    for j in 0..=r {
        scale = scale.max(binom::<T>(r as u64, j as u64) * tuple_norm_sq(tuple, &zf)?.abs());
        zf = zf.shift();
    }
    Ok(scale)
}

/// `Q_r(f)` next to the value it must match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityForm<T: Real> {
    /// `<β_r f, f> - Σ_{n=1}^{deg f} <β_{r+1} L^n f, L^n f>`.
    pub value: T,
    /// `D_{μ_r,0}(f)`.
    pub target: T,
    pub residual: T,
}

pub fn inequality_form<T: Real>(tuple: &MeasureTuple<T>, r: usize, f: &VectorPolynomial<T>) -> Result<InequalityForm<T>> {
    if r < 1 || r >= tuple.m {
        return Err(Error::Precondition(format!("r = {r} outside 1..={}", tuple.m - 1)));
    }
    let mut terms = vec![defect_form(tuple, r, f, f)?];
    for n in 1..=f.degree().max(0) as usize {
        let lf = f.lshift_pow(n);
        terms.push(-defect_form(tuple, r + 1, &lf, &lf)?);
    }
    let value = pairwise_sum(&terms).re;
    let target = dirichlet_norm_sq(tuple.measure(r), 0, f)?;
    Ok(InequalityForm { value, target, residual: (value - target).abs() })
}

/// Dimension of `span{z^n x : x ∈ E, n ≤ d}` via the rank of its Gram matrix.
pub fn wandering_span_dim<T: Real>(tuple: &MeasureTuple<T>, d: usize) -> usize {
    rank(&gram(tuple, d).matrix, lit(1e-12))
}

/// Coefficient vector of a polynomial in the `k·dimE + i` ordering, padded to degree `d`.
pub fn coefficient_vector<T: Real>(f: &VectorPolynomial<T>, d: usize) -> CVec<T> {
    let dim = f.dim();
    let mut out = CVec::from_element((d + 1) * dim, czero());
    for k in 0..=d.min(f.len().saturating_sub(1)) {
        if k < f.len() {
            out.rows_mut(k * dim, dim).copy_from(&f.coeffs()[k]);
        }
    }
    out
}

/// `‖f‖²_𝛍` from a Gram model: `Σ c_a conj(c_b) G[a][b]`.
pub fn gram_norm_sq<T: Real>(model: &GramModel<T>, f: &VectorPolynomial<T>) -> T {
    let c = coefficient_vector(f, model.degree);
    let cbar = c.map(|z| z.conj());
    (c.transpose() * &model.matrix * cbar)[(0, 0)].re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector as unit, identity, max_abs, min_eigenvalue};
    use crate::measures::{lebesgue, make_atomic};
    use crate::scalar::cx;

    fn sigma_tuple(m: usize, dim: usize) -> MeasureTuple<f64> {
        let mut ms = vec![SemiSpectralMeasure::zero(dim); m - 1];
        ms[0] = lebesgue(dim);
        MeasureTuple::new(m, ms).unwrap()
    }

    fn mono(j: usize) -> VectorPolynomial<f64> {
        VectorPolynomial::monomial(j, CVec::from_element(1, cx(1.0, 0.0)))
    }

    #[test]
    fn classical_dirichlet_norms() {
        let t = sigma_tuple(2, 1);
        for k in 0..6 {
            assert_eq!(tuple_norm_sq(&t, &mono(k)).unwrap(), 1.0 + k as f64);
        }
        let g = gram(&t, 2).matrix;
        let expect = CMat::from_diagonal(&CVec::from_vec(vec![cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)]));
        assert_eq!(g, expect);
    }

    #[test]
    fn zero_tuple_gives_h2_gram() {
        let t = MeasureTuple::<f64>::new(3, vec![SemiSpectralMeasure::zero(2), SemiSpectralMeasure::zero(2)]).unwrap();
        assert_eq!(gram(&t, 3).matrix, identity(8));
    }

    #[test]
    fn constants_orthogonal_to_range_of_shift() {
        let mu = make_atomic(1, vec![(0.4, CMat::from_element(1, 1, cx(2.0, 0.0)))]).unwrap();
        let t = MeasureTuple::new(2, vec![mu]).unwrap();
        let x = mono(0);
        let g = VectorPolynomial::new(1, vec![CVec::from_element(1, cx(0.3, 0.1)), CVec::from_element(1, cx(-1.0, 2.0))])
            .unwrap();
        assert!(tuple_inner(&t, &x, &g.shift()).unwrap().norm() < 1e-15);
    }

    #[test]
    fn defect_examples() {
        let t = sigma_tuple(2, 1);
        for k in 0..5 {
            assert!((defect_form(&t, 1, &mono(k), &mono(k)).unwrap().re - 1.0).abs() < 1e-14);
            assert!(defect_form(&t, 2, &mono(k), &mono(k)).unwrap().norm() < 1e-13);
        }
        let f = mono(3);
        assert_eq!(defect_form(&t, 0, &f, &f).unwrap(), tuple_inner(&t, &f, &f).unwrap());
    }

    #[test]
    fn gram_entries_match_tuple_inner() {
        let w = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.2, 0.3), cx(0.2, -0.3), cx(0.5, 0.0)]);
        let mu1 = make_atomic(2, vec![(0.7, w.clone()), (2.0, identity(2))]).unwrap();
        let mu2 = make_atomic(2, vec![(4.1, w)]).unwrap();
        let t = MeasureTuple::new(3, vec![mu1, mu2]).unwrap();
        let model = gram(&t, 4);
        for k in 0..=4 {
            for l in 0..=4 {
                for i in 0..2 {
                    for j in 0..2 {
                        let a = VectorPolynomial::monomial(k, unit(2, i));
                        let b = VectorPolynomial::monomial(l, unit(2, j));
                        let direct = tuple_inner(&t, &a, &b).unwrap();
                        assert!((direct - model.pairing(k, i, l, j)).norm() < 1e-13);
                    }
                }
            }
        }
        assert!(min_eigenvalue(&model.matrix) > 0.0);
        assert!(max_abs(&(&model.matrix - model.matrix.adjoint())) < 1e-14);
    }

    #[test]
    fn inequality_form_on_constant() {
        let mu = make_atomic(1, vec![(1.0, CMat::from_element(1, 1, cx(0.7, 0.0)))]).unwrap();
        let t = MeasureTuple::new(3, vec![lebesgue(1), mu]).unwrap();
        let q = inequality_form(&t, 1, &mono(0).scale(cx(2.0, 0.0))).unwrap();
        assert!((q.value - 4.0).abs() < 1e-13 && q.residual < 1e-13);
        assert!(matches!(inequality_form(&t, 3, &mono(0)), Err(Error::Precondition(_))));
    }

    #[test]
    fn wandering_dims() {
        assert_eq!(wandering_span_dim(&sigma_tuple(2, 1), 5), 6);
        assert_eq!(wandering_span_dim(&sigma_tuple(3, 3), 4), 15);
        assert_eq!(wandering_span_dim(&sigma_tuple(2, 2), 0), 2);
    }

    #[test]
    fn gram_norm_matches_tuple_norm() {
        let w = CMat::from_row_slice(2, 2, &[cx(1.0, 0.0), cx(0.0, 0.4), cx(0.0, -0.4), cx(0.5, 0.0)]);
        let mu = make_atomic::<f64>(2, vec![(1.3, w)]).unwrap();
        let t = MeasureTuple::new(2, vec![mu]).unwrap();
        let f = VectorPolynomial::new(
            2,
            vec![
                CVec::from_vec(vec![cx(1.0, 0.5), cx(0.0, -1.0)]),
                CVec::from_vec(vec![cx(0.2, 0.0), cx(0.3, 0.3)]),
                CVec::from_vec(vec![cx(-1.0, 0.0), cx(0.0, 0.7)]),
            ],
        )
        .unwrap();
        let model = gram(&t, 2);
        assert!((gram_norm_sq(&model, &f) - tuple_norm_sq(&t, &f).unwrap()).abs() < 1e-13);
    }
}
