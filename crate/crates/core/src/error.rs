use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |m - m^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),

    #[error("channel is not completely positive (minimal Choi eigenvalue {0:e})")]
    NotCompletelyPositive(f64),

    #[error("channel must be in canonical form (no pre/post unitaries)")]
    NotCanonical,

    #[error("malformed affine Bloch vector: first component is {0}, expected 1")]
    MalformedBloch(f64),

    #[error("transfer matrix first row must be (1, 0, 0, 0)")]
    NotTracePreserving,

    #[error("filter annihilates the state (normalization {0:e})")]
    VanishingNormalization(f64),

    #[error("filter is singular (|det| = {0:e})")]
    SingularFilter(f64),

    #[error("C-matrix eigenvalue {re} + {im}i is not real")]
    NonRealSpectrum { re: f64, im: f64 },

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("C-matrix eigenvalue {0:e} is negative beyond rounding noise")]
    NegativeSpectrum(f64),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("search grid is empty")]
    EmptyGrid,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, lo: f64, hi: f64, range: &'static str) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
