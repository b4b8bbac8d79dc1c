//! Scalar plumbing shared by every module.
//!
//! All numerical code is written against [`Real`], which is satisfied by `f32`
//! and `f64`. Complex scalars are `num_complex::Complex<T>`.

use std::fmt::Debug;

use nalgebra::{ComplexField, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar type the library is generic over.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync {}

impl<T> Real for T where T: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Send + Sync {}

/// Complex scalar over `T`.
pub type Cx<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts an integer into `T`.
#[inline]
pub fn from_u64<T: Real>(x: u64) -> T {
    T::from_u64(x).expect("integer representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

#[inline]
pub fn cx<T: Real>(re: T, im: T) -> Cx<T> {
    Complex::new(re, im)
}

#[inline]
pub fn czero<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Cx<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn creal<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// `exp(i * theta)`.
#[inline]
pub fn cis<T: Real>(theta: T) -> Cx<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(c, s)
}

#[inline]
pub fn cabs<T: Real>(z: Cx<T>) -> T {
    z.modulus()
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc
}

/// Binomial coefficient as a scalar.
#[inline]
pub fn binom<T: Real>(n: u64, k: u64) -> T {
    T::from_u128(binomial(n, k)).expect("binomial representable in scalar type")
}

/// `n!` as a scalar.
pub fn factorial<T: Real>(n: u64) -> T {
    (1..=n).fold(T::one(), |acc, i| acc * from_u64::<T>(i))
}

/// Pairwise (cascade) summation in a fixed order.
pub fn pairwise_sum<T: Real>(xs: &[Cx<T>]) -> Cx<T> {
    match xs.len() {
        0 => czero(),
        1 => xs[0],
        n if n <= 8 => xs.iter().fold(czero(), |a, b| a + b),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}

/// Pairwise summation of real values.
pub fn pairwise_sum_real<T: Real>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        n if n <= 8 => xs.iter().fold(T::zero(), |a, &b| a + b),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum_real(lo) + pairwise_sum_real(hi)
        }
    }
}

/// Relative residual `|a - b| / max(|terms|)`; zero when every term vanishes.
pub fn relative_residual<T: Real>(lhs: T, rhs: T, terms: &[T]) -> T {
    let diff = (lhs - rhs).abs();
    let scale = terms
        .iter()
        .chain([lhs, rhs].iter())
        .fold(T::zero(), |m, t| m.max(t.abs()));
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}
