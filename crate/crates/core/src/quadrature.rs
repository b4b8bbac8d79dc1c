//! Gauss–Legendre radial nodes and polar tensor grids on discs.

use crate::error::{Error, Result};
use crate::scalar::{cis, from_u64, lit, Cx, Real};

/// Minimum node count along either axis.
pub const MIN_NODES: usize = 16;

/// Node counts of a polar tensor grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    pub radial: usize,
    pub angular: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { radial: 64, angular: 256 }
    }
}

impl Grid {
    pub fn new(radial: usize, angular: usize) -> Result<Self> {
        let g = Self { radial, angular };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.radial < MIN_NODES || self.angular < MIN_NODES {
            return Err(Error::GridTooCoarse { radial: self.radial, angular: self.angular });
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nt = from_u64::<T>(n as u64);
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let k = from_u64::<T>(i as u64 + 1);
        let mut x = (T::pi() * (k - lit(0.25)) / (nt + lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= T::default_epsilon() * lit(4.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != T::zero() {
            dp = d;
        }
        let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if n == 0 {
        return (T::one(), T::zero());
    }
    for k in 2..=n {
        let kt = from_u64::<T>(k as u64);
        let p2 = ((lit::<T>(2.0) * kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let nt = from_u64::<T>(n as u64);
    let d = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Quadrature nodes for `∫_{RD} g dA` with `dA` normalized so the unit disc has area 1.
#[derive(Debug, Clone)]
pub struct PolarRule<T: Real> {
    pub points: Vec<Cx<T>>,
    pub weights: Vec<T>,
}

/// Tensor rule: Gauss–Legendre in `r ∈ [0, R]` times the trapezoid rule in angle.
pub fn disc_rule<T: Real>(radius: T, grid: Grid) -> Result<PolarRule<T>> {
    grid.validate()?;
    let (x, w) = gauss_legendre::<T>(grid.radial);
    let half = radius * lit(0.5);
    let na = from_u64::<T>(grid.angular as u64);
    let angles: Vec<Cx<T>> =
        (0..grid.angular).map(|k| cis(T::two_pi() * from_u64::<T>(k as u64) / na)).collect();
    let mut points = Vec::with_capacity(grid.radial * grid.angular);
    let mut weights = Vec::with_capacity(grid.radial * grid.angular);
    for (xi, wi) in x.iter().zip(&w) {
        let r = half * (*xi + T::one());
        // (1/π) r dr dθ with dθ = 2π/N.
        let wr = lit::<T>(2.0) * half * *wi * r / na;
        for a in &angles {
            points.push(*a * r);
            weights.push(wr);
        }
    }
    Ok(PolarRule { points, weights })
}

/// Trapezoid rule for `∫ g(Rζ) dσ(ζ)`.
pub fn circle_rule<T: Real>(radius: T, angular: usize) -> Result<PolarRule<T>> {
    if angular < MIN_NODES {
        return Err(Error::GridTooCoarse { radial: 0, angular });
    }
    let na = from_u64::<T>(angular as u64);
    let points = (0..angular).map(|k| cis(T::two_pi() * from_u64::<T>(k as u64) / na) * radius).collect();
    Ok(PolarRule { points, weights: vec![T::one() / na; angular] })
}
