use thiserror::Error;

/// Every failure the library can report.
///
/// The variant name leads each message so command-line diagnostics can be
/// matched on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NonHermitianWeight: {what} deviates from Hermitian by {deviation:e}")]
    NonHermitianWeight { what: String, deviation: f64 },
    #[error("NonPSDWeight: {what} has eigenvalue {eigenvalue:e}")]
    NonPsdWeight { what: String, eigenvalue: f64 },
    #[error("NonPSDQ: weight matrix has eigenvalue {eigenvalue:e}")]
    NonPsdQ { eigenvalue: f64 },
    #[error("DimensionMismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("PointOnBoundary: |z| = {modulus} is not inside the disc")]
    PointOnBoundary { modulus: f64 },
    #[error("BadRadius: {radius} outside the admissible range")]
    BadRadius { radius: f64 },
    #[error("GridTooCoarse: quadrature grid ({radial}, {angular}) below 16 points")]
    GridTooCoarse { radial: usize, angular: usize },
    #[error("NotUnitary: |V*V - I|_max = {deviation:e}")]
    NotUnitary { deviation: f64 },
    #[error("NotLeftInvertible: smallest eigenvalue of T*T is {eigenvalue:e}")]
    NotLeftInvertible { eigenvalue: f64 },
    #[error("SeriesNotConverged: last increment {increment:e} after {terms} terms")]
    SeriesNotConverged { increment: f64, terms: usize },
    #[error("TruncationTooShort: {0}")]
    TruncationTooShort(String),
    #[error("BadRange: {0}")]
    BadRange(String),
    #[error("Precondition: {0}")]
    Precondition(String),
    #[error("NotInvariant: |T*AT - A| = {deviation:e}")]
    NotInvariant { deviation: f64 },
    #[error("NotPositive: smallest eigenvalue {eigenvalue:e}")]
    NotPositive { eigenvalue: f64 },
    #[error("DiagonalInconsistent: order {order} varies by {variation:e} along its diagonal")]
    DiagonalInconsistent { order: i64, variation: f64 },
    #[error("InfeasibleSequence: block Toeplitz matrix has eigenvalue {eigenvalue:e}")]
    InfeasibleSequence { eigenvalue: f64 },
    #[error("IllConditioned: {0}")]
    IllConditioned(String),
    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
