use std::fmt;

/// Errors surfaced by the design library.
///
/// `Infeasible` is a domain outcome, not a defect: it signals that the
/// requested secrecy rate cannot be met at any finite power for the given
/// channels / phase configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A matrix tagged Hermitian failed the symmetry check.
    NonHermitianInput { max_asymmetry: f64 },
    /// An iterative kernel exhausted its iteration cap.
    ConvergenceFailure(&'static str),
    /// Scalar argument outside the documented domain.
    DomainError(&'static str),
    /// Operand shapes are inconsistent.
    DimensionMismatch { expected: usize, got: usize },
    /// A vector that must be nonzero has (near-)zero norm.
    ZeroVector,
    /// The target secrecy rate is unreachable at any power.
    Infeasible,
    /// Problem size exceeds a hard cap (brute-force oracle guard).
    TooLarge { size: usize, cap: usize },
    /// An iterative solver stopped without meeting its tolerance.
    NotConverged(&'static str),
    /// Configuration failed validation; carries every violation found.
    InvalidConfig(Vec<String>),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonHermitianInput { max_asymmetry } => {
                write!(f, "matrix is not Hermitian (max |A - A^H| entry = {max_asymmetry:e})")
            }
            Error::ConvergenceFailure(what) => write!(f, "{what} failed to converge"),
            Error::DomainError(msg) => write!(f, "domain error: {msg}"),
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::ZeroVector => write!(f, "vector has zero norm"),
            Error::Infeasible => write!(f, "target secrecy rate is infeasible at any power"),
            Error::TooLarge { size, cap } => {
                write!(f, "problem size {size} exceeds cap {cap}")
            }
            Error::NotConverged(what) => write!(f, "{what} stopped before reaching tolerance"),
            Error::InvalidConfig(violations) => {
                write!(f, "invalid configuration: {}", violations.join("; "))
            }
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
