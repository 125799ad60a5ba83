use alloc::string::String;
use core::fmt;

/// Errors shared by all library modules.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A dimension argument was zero or otherwise unusable.
    InvalidDimension(&'static str),
    /// Two operands disagree on a dimension.
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// Gram matrix is rank deficient or ill conditioned; `rcond` is the
    /// reciprocal condition estimate (0 when the factorization broke down).
    SingularMatrix { rcond: f64 },
    /// A configuration invariant was violated; the message names the fields.
    InvalidConfig(String),
    /// On-grid AoD sampling needs more distinct grid points than exist.
    InfeasibleGrid { needed: usize, available: usize },
    /// Requested codebook size is over the hard cap.
    ResourceLimit { bits: u32, cap: u32 },
    /// A subspace codeword collapsed to (numerically) zero norm.
    DegenerateCodeword { norm: f64 },
    /// Quantization of an exactly zero channel vector.
    ZeroChannel,
    /// Fast subspace search asked of a codebook without stored weights.
    MissingWeights,
    /// Fast subspace search asked with a non-orthonormal effective steering
    /// matrix; `residual` is the Frobenius distance of `T^H T` from identity.
    NotOrthonormal { residual: f64 },
    /// Feedback index outside the codebook.
    IndexOutOfRange { index: usize, len: usize },
    /// Scalar argument outside the function's domain.
    Domain(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidDimension(what) => write!(f, "invalid dimension: {what}"),
            Error::DimensionMismatch {
                what,
                expected,
                got,
            } => write!(f, "dimension mismatch ({what}): expected {expected}, got {got}"),
            Error::SingularMatrix { rcond } => {
                write!(f, "singular or ill-conditioned matrix (rcond estimate {rcond:.3e})")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::InfeasibleGrid { needed, available } => write!(
                f,
                "on-grid AoD sampling needs {needed} distinct grid points but only {available} exist"
            ),
            Error::ResourceLimit { bits, cap } => {
                write!(f, "codebook of B={bits} bits exceeds the cap of {cap} bits")
            }
            Error::DegenerateCodeword { norm } => {
                write!(f, "degenerate subspace codeword (norm {norm:.3e})")
            }
            Error::ZeroChannel => write!(f, "cannot quantize a zero channel vector"),
            Error::MissingWeights => {
                write!(f, "codebook has no stored weights; fast subspace search unsupported")
            }
            Error::NotOrthonormal { residual } => write!(
                f,
                "effective steering matrix is not orthonormal (residual {residual:.3e})"
            ),
            Error::IndexOutOfRange { index, len } => {
                write!(f, "feedback index {index} out of range for codebook of {len} entries")
            }
            Error::Domain(what) => write!(f, "domain error: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
