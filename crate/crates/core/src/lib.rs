//! Weighted Dirichlet-type spaces, m-isometries and moment recovery.
//!
//! The numerical core is generic over the real scalar `T` (`f32` or `f64`);
//! the aliases below fix `T = f64`.

pub mod cli;
pub mod corpus;
pub mod dirichlet;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod operators;
pub mod polynomials;
pub mod quadrature;
pub mod recovery;
pub mod scalar;
pub mod spaces;

pub use error::{Error, Result};

pub type Complex = scalar::Cx<f64>;
pub type Matrix = linalg::CMat<f64>;
pub type Vector = linalg::CVec<f64>;
pub type Measure = measures::SemiSpectralMeasure<f64>;
pub type Moments = measures::MomentSequence<f64>;
pub type Polynomial = polynomials::VectorPolynomial<f64>;
pub type Tuple = spaces::MeasureTuple<f64>;
pub type Gram = spaces::GramModel<f64>;
pub type Operator = operators::OperatorMatrix<f64>;
pub type Hermitian = linalg::HermitianMatrix<f64>;
