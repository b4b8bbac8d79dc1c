//! Weighted Dirichlet forms `D_{μ,n}` on polynomials and their identity checks.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMat, HermitianMatrix};
use crate::measures::{MomentSource, SemiSpectralMeasure};
use crate::polynomials::VectorPolynomial;
use crate::quadrature::{circle_rule, disc_rule, Grid};
use crate::scalar::{binom, factorial, lit, pairwise_sum, pairwise_sum_real, relative_residual, to_f64, Cx, Real};

/// Default tolerance for identities that hold exactly.
pub const EXACT_TOL: f64 = 1e-8;
/// Default tolerance for quadrature-backed identities.
pub const QUADRATURE_TOL: f64 = 1e-3;
/// Slack allowed on contractivity violations.
pub const CONTRACTIVITY_TOL: f64 = 1e-10;
/// Slack allowed on the multiplier bound.
pub const MULTIPLIER_TOL: f64 = 1e-9;

/// Outcome of one residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub n: i64,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
    pub digest: String,
}

impl IdentityReport {
    pub fn new(identity: impl Into<String>, n: i64, residual: f64, tol: f64, digest: impl Into<String>) -> Self {
        Self { identity: identity.into(), n, residual, tol, pass: residual <= tol, digest: digest.into() }
    }
}

/// FNV-1a over the bit patterns of a polynomial's coefficients and a few moments.
pub fn digest<T: Real>(mu: &impl MomentSource<T>, f: &VectorPolynomial<T>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |x: f64| {
        for b in x.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for c in f.coeffs() {
        for z in c.iter() {
            feed(to_f64(z.re));
            feed(to_f64(z.im));
        }
    }
    for j in 0..=f.len() as i64 {
        for z in mu.moment(j).iter() {
            feed(to_f64(z.re));
            feed(to_f64(z.im));
        }
    }
    format!("{h:016x}")
}

/// `Σ_{k,l≥n} C(k∧l, n) <m(l-k) f̂(k), ĝ(l)>`, summed with `k` outer and `l` inner.
pub fn dirichlet_form<T: Real, M: MomentSource<T> + ?Sized>(
    mu: &M,
    n: usize,
    f: &VectorPolynomial<T>,
    g: &VectorPolynomial<T>,
) -> Result<Cx<T>> {
    let d = mu.dim();
    if f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: f.dim() });
    }
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: g.dim() });
    }
    let (nf, ng) = (f.len(), g.len());
    if nf <= n || ng <= n {
        return Ok(Cx::new(T::zero(), T::zero()));
    }
    let offset = nf as i64 - 1;
    let moments: Vec<CMat<T>> = (-(nf as i64 - 1)..=(ng as i64 - 1)).map(|s| mu.moment(s)).collect();
    let mut terms = Vec::with_capacity((nf - n) * (ng - n));
    for k in n..nf {
        let fk = &f.coeffs()[k];
        for l in n..ng {
            let m = &moments[(l as i64 - k as i64 + offset) as usize];
            let w = binom::<T>(k.min(l) as u64, n as u64);
            terms.push(g.coeffs()[l].dotc(&(m * fk)) * w);
        }
    }
    Ok(pairwise_sum(&terms))
}

/// `D_{μ,n}(f)`, the real part of the self-pairing.
pub fn dirichlet_norm_sq<T: Real, M: MomentSource<T> + ?Sized>(
    mu: &M,
    n: usize,
    f: &VectorPolynomial<T>,
) -> Result<T> {
    Ok(dirichlet_form(mu, n, f, f)?.re)
}

/// `D(μ, n, R, f)` by quadrature over `R·D` (or the circle of radius `R` when `n = 0`).
pub fn refined_integral<T: Real>(
    mu: &SemiSpectralMeasure<T>,
    n: usize,
    radius: T,
    f: &VectorPolynomial<T>,
    grid: Grid,
) -> Result<T> {
    if !(radius > T::zero() && radius < T::one()) {
        return Err(Error::BadRadius { radius: to_f64(radius) });
    }
    grid.validate()?;
    if f.dim() != mu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), found: f.dim() });
    }
    if n == 0 {
        let rule = circle_rule(radius, grid.angular)?;
        let mut vals = Vec::with_capacity(rule.points.len());
        for (z, w) in rule.points.iter().zip(&rule.weights) {
            let p = mu.poisson(*z)?;
            vals.push(*w * p.quadratic_form(&f.eval(*z)));
        }
        return Ok(pairwise_sum_real(&vals));
    }
    let df = f.derivative(n);
    if df.is_zero() {
        return Ok(T::zero());
    }
    let rule = disc_rule(radius, grid)?;
    let r2 = radius * radius;
    let mut vals = Vec::with_capacity(rule.points.len());
    for (z, w) in rule.points.iter().zip(&rule.weights) {
        let p = mu.poisson(*z)?;
        let weight = (r2 - z.norm_sqr()).powi(n as i32 - 1);
        vals.push(*w * weight * p.quadratic_form(&df.eval(*z)));
    }
    let norm = factorial::<T>(n as u64) * factorial::<T>(n as u64 - 1);
    Ok(pairwise_sum_real(&vals) / norm)
}

/// `∫_D <Q g, g> (1-|z|²)^b dA` by polar quadrature on the unit disc.
pub fn weighted_area_norm<T: Real>(q: &HermitianMatrix<T>, g: &VectorPolynomial<T>, b: u32, grid: Grid) -> Result<T> {
    if q.dim() != g.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: q.dim() });
    }
    let rule = disc_rule(T::one(), grid)?;
    let vals: Vec<T> = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(z, w)| *w * (T::one() - z.norm_sqr()).powi(b as i32) * q.quadratic_form(&g.eval(*z)))
        .collect();
    Ok(pairwise_sum_real(&vals))
}

/// Tolerances and quadrature settings for [`verify_difference_identities`].
#[derive(Debug, Clone, Copy)]
pub struct IdentityConfig<T: Real> {
    pub exact_tol: f64,
    pub quadrature_tol: f64,
    pub radius: T,
    pub grid: Grid,
    /// Skip the quadrature-backed check.
    pub skip_quadrature: bool,
}

impl<T: Real> Default for IdentityConfig<T> {
    fn default() -> Self {
        Self {
            exact_tol: EXACT_TOL,
            quadrature_tol: QUADRATURE_TOL,
            radius: lit(0.9),
            grid: Grid::default(),
            skip_quadrature: false,
        }
    }
}

/// Runs the difference, backward-series and forward-difference identities for
/// `n ≤ nmax`, one report per identity per order.
pub fn verify_difference_identities<T: Real>(
    mu: &SemiSpectralMeasure<T>,
    f: &VectorPolynomial<T>,
    nmax: usize,
    cfg: &IdentityConfig<T>,
) -> Result<Vec<IdentityReport>> {
    if nmax > 8 {
        return Err(Error::Precondition(format!("nmax = {nmax} exceeds 8")));
    }
    let dg = digest(mu, f);
    let zf = f.shift();
    let d = |n: usize, p: &VectorPolynomial<T>| dirichlet_norm_sq(mu, n, p);
    let mut out = Vec::new();

    // D_{n+1}(zf) - D_{n+1}(f) = D_n(f)
    for n in 0..=nmax {
        let (a, b, c) = (d(n + 1, &zf)?, d(n + 1, f)?, d(n, f)?);
        let res = relative_residual(a - b, c, &[a, b]);
        out.push(IdentityReport::new("coefficient_difference", n as i64, to_f64(res), cfg.exact_tol, &dg));
    }
    // D_n(zf) - D_n(f) = D_{n-1}(f)
    for n in 1..=nmax {
        let (a, b, c) = (d(n, &zf)?, d(n, f)?, d(n - 1, f)?);
        let res = relative_residual(a - b, c, &[a, b]);
        out.push(IdentityReport::new("multiplier_difference", n as i64, to_f64(res), cfg.exact_tol, &dg));
    }
    // D(n+1, R, zf) - R² D(n+1, R, f) = R² D(n, R, f)
    if !cfg.skip_quadrature {
        let r2 = cfg.radius * cfg.radius;
        for n in 0..nmax {
            let a = refined_integral(mu, n + 1, cfg.radius, &zf, cfg.grid)?;
            let b = refined_integral(mu, n + 1, cfg.radius, f, cfg.grid)?;
            let c = refined_integral(mu, n, cfg.radius, f, cfg.grid)?;
            let res = relative_residual(a - r2 * b, r2 * c, &[a, r2 * b]);
            out.push(IdentityReport::new("refined_difference", n as i64, to_f64(res), cfg.quadrature_tol, &dg));
        }
    }
    // Σ_{k≥1} D_j(L^k f) = D_{j+1}(f)
    let deg = f.degree().max(0) as usize;
    for j in 0..=nmax {
        let parts: Vec<T> = (1..=deg).map(|k| d(j, &f.lshift_pow(k))).collect::<Result<_>>()?;
        let lhs = pairwise_sum_real(&parts);
        let rhs = d(j + 1, f)?;
        let res = relative_residual(lhs, rhs, &parts);
        out.push(IdentityReport::new("backward_series", j as i64, to_f64(res), cfg.exact_tol, &dg));
        if j == 0 {
            out.push(IdentityReport::new("backward_series_zero", 0, to_f64(res), cfg.exact_tol, &dg));
        }
    }
    // Δ^n D_j(f) = D_{j-n}(f) for n ≤ j, 0 for n = j+1
    for j in 0..=nmax {
        let shifted: Vec<VectorPolynomial<T>> = (0..=j + 1)
            .scan(f.clone(), |p, _| {
                let cur = p.clone();
                *p = p.shift();
                Some(cur)
            })
            .collect();
        let values: Vec<T> = shifted.iter().map(|p| d(j, p)).collect::<Result<_>>()?;
        for n in 0..=j + 1 {
            let terms: Vec<T> = (0..=n)
                .map(|i| {
                    let sign = if (n - i) % 2 == 0 { T::one() } else { -T::one() };
                    sign * binom::<T>(n as u64, i as u64) * values[i]
                })
                .collect();
            let lhs = pairwise_sum_real(&terms);
            let rhs = if n <= j { d(j - n, f)? } else { T::zero() };
            let res = relative_residual(lhs, rhs, &terms);
            out.push(IdentityReport::new(format!("forward_difference_j{j}"), n as i64, to_f64(res), cfg.exact_tol, &dg));
        }
    }
    Ok(out)
}

/// Contractivity of `f ↦ f_r` in `D_{μ,n}` over a grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractivityReport {
    pub report: IdentityReport,
    /// `(r, D_{μ,n}(f_r - f))` in grid order.
    pub gaps: Vec<(f64, f64)>,
    /// Whether the gaps decrease along the sorted grid.
    pub gaps_decreasing: bool,
}

pub fn verify_dilation_contractivity<T: Real>(
    mu: &SemiSpectralMeasure<T>,
    f: &VectorPolynomial<T>,
    n: usize,
    radii: &[T],
) -> Result<ContractivityReport> {
    let base = dirichlet_norm_sq(mu, n, f)?;
    let mut sorted = radii.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut worst = T::zero();
    let mut gaps = Vec::with_capacity(sorted.len());
    for &r in &sorted {
        let fr = f.dilate(r)?;
        worst = worst.max(dirichlet_norm_sq(mu, n, &fr)? - base);
        gaps.push((to_f64(r), to_f64(dirichlet_norm_sq(mu, n, &fr.sub(f)?)?)));
    }
    let gaps_decreasing = gaps.windows(2).all(|w| w[1].1 <= w[0].1 + CONTRACTIVITY_TOL);
    Ok(ContractivityReport {
        report: IdentityReport::new("dilation_contractivity", n as i64, to_f64(worst), CONTRACTIVITY_TOL, digest(mu, f)),
        gaps,
        gaps_decreasing,
    })
}

/// `D_{μ,1}(zf) ≤ 2<μ(T)f(0), f(0)> + 3 D_{μ,1}(f)`; residual is the relative excess.
pub fn verify_multiplier_bound<T: Real>(mu: &SemiSpectralMeasure<T>, f: &VectorPolynomial<T>) -> Result<IdentityReport> {
    let lhs = dirichlet_norm_sq(mu, 1, &f.shift())?;
    let f0 = f.coeff(0);
    let mass = mu.mass();
    let rhs = lit::<T>(2.0) * f0.dotc(&(&mass * &f0)).re + lit::<T>(3.0) * dirichlet_norm_sq(mu, 1, f)?;
    let res = relative_residual((lhs - rhs).max(T::zero()), T::zero(), &[lhs, rhs]);
    Ok(IdentityReport::new("multiplier_bound", 1, to_f64(res), MULTIPLIER_TOL, digest(mu, f)))
}

/// Lower (`n ≥ 1`) and upper (`n ≥ 2`) embedding bounds of `D_{μ,n}` by weighted
/// area norms of `f^{(n)}` against `μ(T)`.
pub fn verify_embeddings<T: Real>(
    mu: &SemiSpectralMeasure<T>,
    f: &VectorPolynomial<T>,
    n: usize,
    grid: Grid,
) -> Result<Vec<IdentityReport>> {
    if n == 0 {
        return Err(Error::Precondition("embedding bounds need n ≥ 1".into()));
    }
    let dval = dirichlet_norm_sq(mu, n, f)?;
    let q = HermitianMatrix::new(mu.mass())?;
    let df = f.derivative(n);
    let c = factorial::<T>(n as u64) * factorial::<T>(n as u64 - 1);
    let dg = digest(mu, f);
    let mut out = Vec::new();
    let low = weighted_area_norm(&q, &df, n as u32, grid)? / (lit::<T>(4.0) * c);
    let res = relative_residual((low - dval).max(T::zero()), T::zero(), &[low, dval]);
    out.push(IdentityReport::new("embedding_lower", n as i64, to_f64(res), QUADRATURE_TOL, &dg));
    if n >= 2 {
        let up = lit::<T>(4.0) * weighted_area_norm(&q, &df, n as u32 - 2, grid)? / c;
        let res = relative_residual((dval - up).max(T::zero()), T::zero(), &[up, dval]);
        out.push(IdentityReport::new("embedding_upper", n as i64, to_f64(res), QUADRATURE_TOL, &dg));
    }
    Ok(out)
}

/// Refined integral at radius `R` against `D_{λ_R,n}(f_R)` computed from dilated moments.
pub fn verify_refined_quadrature<T: Real>(
    mu: &SemiSpectralMeasure<T>,
    f: &VectorPolynomial<T>,
    n: usize,
    radius: T,
    grid: Grid,
) -> Result<IdentityReport> {
    let q = refined_integral(mu, n, radius, f, grid)?;
    let exact = dirichlet_norm_sq(&mu.dilate(radius)?, n, &f.dilate(radius)?)?;
    let res = relative_residual(q - exact, T::zero(), &[q, exact]);
    Ok(IdentityReport::new("refined_quadrature", n as i64, to_f64(res), QUADRATURE_TOL, digest(mu, f)))
}

/// `D_{μ,n}(f - s_ℓ f)` for the degree-`ℓ` truncation `s_ℓ`.
pub fn truncation_tail<T: Real>(mu: &SemiSpectralMeasure<T>, n: usize, f: &VectorPolynomial<T>, ell: usize) -> Result<T> {
    let tail = f.sub(&f.truncate(ell))?;
    dirichlet_norm_sq(mu, n, &tail)
}
