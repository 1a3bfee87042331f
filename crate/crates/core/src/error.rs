use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("λ = {lam} is within {distance:e} of the pole {pole} of the series representation")]
    PoleProximity {
        lam: Complex64,
        pole: Complex64,
        distance: f64,
    },

    #[error("|λ| = {0:e} is too close to zero")]
    ZeroWavenumber(f64),

    #[error("limit at n = {n} did not stabilise (last change {change:e}, estimate {estimate})")]
    ExtrapolationDivergence {
        n: usize,
        estimate: Complex64,
        change: f64,
    },

    #[error("contour passes within {0:e} of a zero")]
    ContourThroughZero(f64),

    #[error("zero search exceeded subdivision depth {0}")]
    BudgetExceeded(usize),

    #[error("λ = {lam} is too close to the spectrum (|coefficient| = {value:e})")]
    NearSpectrum { lam: Complex64, value: f64 },

    #[error("estimated β = {0} is not real")]
    NonRealBeta(Complex64),

    #[error("no eigenvalues and no asymptotic data available for β recovery")]
    NoData,

    #[error("only {found} samples within radius {radius} of λ = {lam}, need {needed}")]
    InsufficientSamples {
        lam: Complex64,
        found: usize,
        needed: usize,
        radius: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Error::Io(e.to_string())
        } else {
            Error::Schema(e.to_string())
        }
    }
}
