//! Matrix-valued positive measures on the unit circle.
//!
//! Two representations are supported, both with closed-form Fourier moments
//! `m(j) = ∫ ζ^{-j} dμ(ζ)`:
//!
//! * atomic measures `Σ_i W_i δ_{exp(iθ_i)}` with PSD weights `W_i`;
//! * trigonometric densities `w(φ) dσ(φ)` with
//!   `w(φ) = Σ_{|s|≤S} C_s e^{-isφ}`, so that `m(j) = C_{-j}`.
//!
//! Scalarizations `μ_{x,y}` are never stored; everything downstream goes
//! through moments and Poisson integrals.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_deviation, identity, max_abs, min_eigenvalue, zeros, CMat, HermitianMatrix};
use crate::scalar::{cis, creal, from_u64, lit, to_f64, Real};

/// Number of equispaced samples used to validate trigonometric densities.
pub const DENSITY_SAMPLES: usize = 256;
/// Eigenvalue floor for sampled densities.
pub const DENSITY_TOL: f64 = 1e-9;
/// Unitarity tolerance on `|V*V - I|_max`.
pub const UNITARY_TOL: f64 = 1e-10;
/// Points with `|z| >= 1 - BOUNDARY_MARGIN` are rejected by Poisson evaluation.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

/// Anything with Fourier moments: measures, dilations and recovered sequences.
pub trait MomentSource<T: Real> {
    fn dim(&self) -> usize;

    /// `∫ ζ^{-j} dμ(ζ)`.
    fn moment(&self, j: i64) -> CMat<T>;

    /// `μ(𝕋)`.
    fn mass(&self) -> CMat<T> {
        self.moment(0)
    }

    /// Poisson integral summed from the Fourier series
    /// `Σ_s r^{|s|} e^{isφ} m(s)` until terms drop below `tol` (or `max_terms`).
    fn poisson_series(&self, z: crate::scalar::Cx<T>, tol: T, max_terms: usize) -> CMat<T> {
        let r = z.norm_sqr().sqrt();
        let phi = z.im.atan2(z.re);
        let mut acc = self.moment(0);
        let mut rs = T::one();
        for s in 1..=max_terms as i64 {
            rs *= r;
            let fwd = self.moment(s) * (cis(phi * from_u64::<T>(s as u64)) * creal(rs));
            let bwd = self.moment(-s) * (cis(-phi * from_u64::<T>(s as u64)) * creal(rs));
            let term = fwd + bwd;
            acc += &term;
            if rs < tol {
                break;
            }
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T: Real> {
    /// Angle in `[0, 2π)`.
    pub angle: T,
    pub weight: HermitianMatrix<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureBody<T: Real> {
    Atomic(Vec<Atom<T>>),
    /// Coefficients `C_s` keyed by `s`; missing keys are zero.
    TrigDensity(BTreeMap<i64, CMat<T>>),
}

/// A `B(E)`-valued semi-spectral measure with `dim E = dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SemiSpectralMeasure<T: Real> {
    dim: usize,
    body: MeasureBody<T>,
}

fn canonical_angle<T: Real>(theta: T) -> T {
    let tau = T::two_pi();
    let mut a = theta % tau;
    if a < T::zero() {
        a += tau;
    }
    if a >= tau {
        a -= tau;
    }
    a
}

/// Builds a validated atomic measure from `(angle, weight)` pairs.
///
/// Zero weights are kept; duplicate angles are allowed.
pub fn make_atomic<T: Real>(dim: usize, atoms: Vec<(T, CMat<T>)>) -> Result<SemiSpectralMeasure<T>> {
    let mut out = Vec::with_capacity(atoms.len());
    for (idx, (angle, w)) in atoms.into_iter().enumerate() {
        if w.nrows() != dim || w.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: w.nrows().max(w.ncols()) });
        }
        let dev = hermitian_deviation(&w);
        if dev > lit(crate::linalg::HERMITIAN_TOL) {
            return Err(Error::NonHermitianWeight { what: format!("atom {idx}"), deviation: to_f64(dev) });
        }
        let weight = HermitianMatrix::new(w)?;
        let lo = weight.min_eigenvalue();
        if lo < -lit::<T>(crate::linalg::PSD_TOL) {
            return Err(Error::NonPsdWeight { what: format!("atom {idx}"), eigenvalue: to_f64(lo) });
        }
        out.push(Atom { angle: canonical_angle(angle), weight });
    }
    Ok(SemiSpectralMeasure { dim, body: MeasureBody::Atomic(out) })
}

/// Normalized arc length `σ ⊗ I`.
pub fn lebesgue<T: Real>(dim: usize) -> SemiSpectralMeasure<T> {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(0, identity(dim));
    SemiSpectralMeasure { dim, body: MeasureBody::TrigDensity(coeffs) }
}

/// Builds a validated trigonometric density from its coefficients `C_s`.
pub fn make_trig<T: Real>(dim: usize, coeffs: BTreeMap<i64, CMat<T>>) -> Result<SemiSpectralMeasure<T>> {
    for (s, c) in &coeffs {
        if c.nrows() != dim || c.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: c.nrows().max(c.ncols()) });
        }
        let partner = coeffs.get(&-s).cloned().unwrap_or_else(|| zeros(dim, dim));
        let dev = max_abs(&(&partner - c.adjoint()));
        if dev > lit(crate::linalg::HERMITIAN_TOL) {
            return Err(Error::NonHermitianWeight { what: format!("coefficient pair ±{s}"), deviation: to_f64(dev) });
        }
    }
    let mu = SemiSpectralMeasure { dim, body: MeasureBody::TrigDensity(coeffs) };
    let lo = mu.sampled_density_min_eigenvalue();
    if lo < -lit::<T>(DENSITY_TOL) {
        return Err(Error::NonPsdWeight { what: "density".into(), eigenvalue: to_f64(lo) });
    }
    Ok(mu)
}

impl<T: Real> SemiSpectralMeasure<T> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, body: MeasureBody::Atomic(Vec::new()) }
    }

    pub fn body(&self) -> &MeasureBody<T> {
        &self.body
    }

    /// Density `w(φ) = Σ_s C_s e^{-isφ}`; `None` for atomic measures.
    pub fn density(&self, phi: T) -> Option<CMat<T>> {
        match &self.body {
            MeasureBody::Atomic(_) => None,
            MeasureBody::TrigDensity(c) => {
                let mut acc = zeros(self.dim, self.dim);
                for (s, cs) in c {
                    acc += cs * cis(-phi * lit::<T>(*s as f64));
                }
                Some(acc)
            }
        }
    }

    fn sampled_density_min_eigenvalue(&self) -> T {
        let n = DENSITY_SAMPLES;
        (0..n)
            .map(|k| {
                let phi = T::two_pi() * from_u64::<T>(k as u64) / from_u64::<T>(n as u64);
                min_eigenvalue(&self.density(phi).expect("trig density"))
            })
            .fold(T::max_value().unwrap_or_else(T::one), |a, b| a.min(b))
    }

    /// Poisson integral `P_μ(z)` for `|z| < 1 - 1e-9`.
    pub fn poisson(&self, z: crate::scalar::Cx<T>) -> Result<HermitianMatrix<T>> {
        let r2 = z.norm_sqr();
        let r = r2.sqrt();
        if r >= T::one() - lit::<T>(BOUNDARY_MARGIN) {
            return Err(Error::PointOnBoundary { modulus: to_f64(r) });
        }
        let mut acc = zeros(self.dim, self.dim);
        match &self.body {
            MeasureBody::Atomic(atoms) => {
                for a in atoms {
                    let zeta = cis(a.angle);
                    let kernel = (T::one() - r2) / (z - zeta).norm_sqr();
                    acc += a.weight.matrix() * creal(kernel);
                }
            }
            MeasureBody::TrigDensity(c) => {
                let phi = z.im.atan2(z.re);
                for (s, cs) in c {
                    // C_s multiplies e^{-isφ} r^{|s|}.
                    let rs = r.powi(s.unsigned_abs() as i32);
                    acc += cs * (cis(-phi * lit::<T>(*s as f64)) * creal(rs));
                }
            }
        }
        Ok(HermitianMatrix::new(crate::linalg::hermitian_part(&acc)).expect("hermitian part"))
    }

    /// Moments of `λ_R`, the measure with density `P_μ(Rζ)`.
    pub fn dilate(&self, radius: T) -> Result<DilatedMeasure<T>> {
        if !(radius > T::zero() && radius <= T::one()) {
            return Err(Error::BadRadius { radius: to_f64(radius) });
        }
        Ok(DilatedMeasure { base: self.clone(), radius })
    }

    /// `V* μ V`.
    pub fn conjugate(&self, v: &CMat<T>) -> Result<Self> {
        check_unitary(v)?;
        if v.nrows() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.nrows() });
        }
        let vt = v.adjoint();
        let body = match &self.body {
            MeasureBody::Atomic(atoms) => MeasureBody::Atomic(
                atoms
                    .iter()
                    .map(|a| Atom {
                        angle: a.angle,
                        weight: HermitianMatrix::new(crate::linalg::hermitian_part(&(&vt * a.weight.matrix() * v)))
                            .expect("conjugated weight is Hermitian"),
                    })
                    .collect(),
            ),
            MeasureBody::TrigDensity(c) => {
                MeasureBody::TrigDensity(c.iter().map(|(s, cs)| (*s, &vt * cs * v)).collect())
            }
        };
        Ok(Self { dim: self.dim, body })
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.body, MeasureBody::Atomic(_))
    }

    /// Scales all weights by a nonnegative factor.
    pub fn scaled(&self, factor: T) -> Self {
        assert!(factor >= T::zero());
        let body = match &self.body {
            MeasureBody::Atomic(atoms) => MeasureBody::Atomic(
                atoms
                    .iter()
                    .map(|a| Atom {
                        angle: a.angle,
                        weight: HermitianMatrix::new(a.weight.matrix() * creal(factor)).expect("scaled weight"),
                    })
                    .collect(),
            ),
            MeasureBody::TrigDensity(c) => {
                MeasureBody::TrigDensity(c.iter().map(|(s, cs)| (*s, cs * creal(factor))).collect())
            }
        };
        Self { dim: self.dim, body }
    }
}

impl<T: Real> MomentSource<T> for SemiSpectralMeasure<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn moment(&self, j: i64) -> CMat<T> {
        match &self.body {
            MeasureBody::Atomic(atoms) => {
                let mut acc = zeros(self.dim, self.dim);
                let jt = lit::<T>(j as f64);
                for a in atoms {
                    acc += a.weight.matrix() * cis(-jt * a.angle);
                }
                acc
            }
            MeasureBody::TrigDensity(c) => c.get(&-j).cloned().unwrap_or_else(|| zeros(self.dim, self.dim)),
        }
    }
}

/// `λ_R` with `dλ_R(ζ) = P_μ(Rζ) dσ(ζ)`; moments `R^{|j|} m(j)`.
#[derive(Debug, Clone)]
pub struct DilatedMeasure<T: Real> {
    base: SemiSpectralMeasure<T>,
    radius: T,
}

impl<T: Real> DilatedMeasure<T> {
    pub fn radius(&self) -> T {
        self.radius
    }

    /// `P_μ(Rz)`, the closed form of the Poisson integral of `λ_R`.
    pub fn poisson(&self, z: crate::scalar::Cx<T>) -> Result<HermitianMatrix<T>> {
        self.base.poisson(z * creal(self.radius))
    }
}

impl<T: Real> MomentSource<T> for DilatedMeasure<T> {
    fn dim(&self) -> usize {
        self.base.dim
    }

    fn moment(&self, j: i64) -> CMat<T> {
        self.base.moment(j) * creal(self.radius.powi(j.unsigned_abs() as i32))
    }
}

/// Verifies `|V*V - I|_max <= 1e-10`.
pub fn check_unitary<T: Real>(v: &CMat<T>) -> Result<()> {
    if !v.is_square() {
        return Err(Error::DimensionMismatch { expected: v.nrows(), found: v.ncols() });
    }
    let dev = max_abs(&(v.adjoint() * v - identity::<T>(v.nrows())));
    if dev > lit(UNITARY_TOL) {
        return Err(Error::NotUnitary { deviation: to_f64(dev) });
    }
    Ok(())
}

/// Hermitian-symmetric family `m(-S..=S)` of `dim × dim` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<T: Real> {
    dim: usize,
    max_order: usize,
    /// `data[s + S] = m(s)`.
    data: Vec<CMat<T>>,
}

impl<T: Real> MomentSequence<T> {
    /// Takes `m(0..=S)` and fills negative orders by `m(-s) = m(s)*`.
    pub fn from_nonnegative(dim: usize, forward: Vec<CMat<T>>) -> Result<Self> {
        let Some(first) = forward.first() else {
            return Err(Error::BadRange("empty moment sequence".into()));
        };
        let dev = hermitian_deviation(first);
        let scale = max_abs(first).max(T::one());
        if dev > lit::<T>(crate::linalg::HERMITIAN_TOL) * scale {
            return Err(Error::NonHermitianWeight { what: "m(0)".into(), deviation: to_f64(dev) });
        }
        let s_max = forward.len() - 1;
        let mut data = Vec::with_capacity(2 * s_max + 1);
        for s in (1..=s_max).rev() {
            data.push(forward[s].adjoint());
        }
        for (s, m) in forward.into_iter().enumerate() {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
            }
            data.push(if s == 0 { crate::linalg::hermitian_part(&m) } else { m });
        }
        Ok(Self { dim, max_order: s_max, data })
    }

    /// Takes the full family `m(-S..=S)` and validates Hermitian symmetry
    /// within `1e-12 * max(1, max|m|)`.
    pub fn new(dim: usize, full: Vec<CMat<T>>) -> Result<Self> {
        if full.len().is_multiple_of(2) {
            return Err(Error::BadRange("moment family must have odd length".into()));
        }
        let s_max = full.len() / 2;
        let scale = full.iter().fold(T::one(), |a, m| a.max(max_abs(m)));
        for s in 0..=s_max {
            let dev = max_abs(&(&full[s_max - s] - full[s_max + s].adjoint()));
            if dev > lit::<T>(crate::linalg::HERMITIAN_TOL) * scale {
                return Err(Error::NonHermitianWeight { what: format!("moment pair ±{s}"), deviation: to_f64(dev) });
            }
        }
        Ok(Self { dim, max_order: s_max, data: full })
    }

    /// Moments `m(-S..=S)` of any source.
    pub fn from_source(src: &impl MomentSource<T>, max_order: usize) -> Self {
        let s = max_order as i64;
        Self { dim: src.dim(), max_order, data: (-s..=s).map(|j| src.moment(j)).collect() }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    /// `m(s)` for `|s| <= S`.
    pub fn get(&self, s: i64) -> Option<&CMat<T>> {
        let idx = s + self.max_order as i64;
        if idx < 0 {
            return None;
        }
        self.data.get(idx as usize)
    }

    /// Largest `|m(s) - m(-s)*|` entry.
    pub fn hermitian_defect(&self) -> T {
        (0..=self.max_order as i64).fold(T::zero(), |a, s| {
            a.max(max_abs(&(self.get(-s).unwrap() - self.get(s).unwrap().adjoint())))
        })
    }

    /// `V* m(s) V` for every `s`.
    pub fn conjugate(&self, v: &CMat<T>) -> Self {
        let vt = v.adjoint();
        Self { dim: self.dim, max_order: self.max_order, data: self.data.iter().map(|m| &vt * m * v).collect() }
    }

    /// Entrywise maximum deviation from another sequence over common orders.
    pub fn max_deviation(&self, other: &Self) -> T {
        let s = self.max_order.min(other.max_order) as i64;
        (-s..=s).fold(T::zero(), |a, j| a.max(max_abs(&(self.get(j).unwrap() - other.get(j).unwrap()))))
    }
}

impl<T: Real> MomentSource<T> for MomentSequence<T> {
    fn dim(&self) -> usize {
        self.dim
    }

    /// Zero beyond the stored order.
    fn moment(&self, j: i64) -> CMat<T> {
        self.get(j).cloned().unwrap_or_else(|| zeros(self.dim, self.dim))
    }
}

/// `(S+1)·dim` square matrix with block `(k, l) = m(l - k)`.
pub fn block_toeplitz<T: Real>(src: &impl MomentSource<T>, order: usize) -> CMat<T> {
    let d = src.dim();
    let n = order + 1;
    let moments: Vec<CMat<T>> = (-(order as i64)..=order as i64).map(|j| src.moment(j)).collect();
    let mut out = zeros(n * d, n * d);
    for k in 0..n {
        for l in 0..n {
            let m = &moments[(l as i64 - k as i64 + order as i64) as usize];
            out.view_mut((k * d, l * d), (d, d)).copy_from(m);
        }
    }
    out
}
