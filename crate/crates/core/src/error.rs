use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported matrix dimension {0} (expected 2 or 4)")]
    UnsupportedDim(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected {expected} entries for dimension {dim}, found {found}")]
    EntryCount {
        dim: usize,
        expected: usize,
        found: usize,
    },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("channel has no Kraus operators")]
    EmptyChannel,
    #[error("invalid control assignment: {0}")]
    InvalidAssignment(String),
    #[error("measurement basis is not orthonormal (deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("degenerate branch: lambda = {lam} leaves a conditional state undefined")]
    DegenerateBranch { lam: f64 },
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, range })
    }
}
