use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported dimension {0}; supported dimensions are 1, 2 and 3")]
    UnsupportedDimension(usize),

    #[error("quadrature too small: {axis_size} nodes per axis cannot resolve shells up to {kmax}")]
    UndersizedQuadrature { axis_size: usize, kmax: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("finite difference of order {order} at shell {k} runs past truncation {kmax}")]
    DifferencePastTruncation { order: usize, k: usize, kmax: usize },

    #[error("grid spacing {spacing} exceeds the aliasing limit {limit}")]
    Aliasing { spacing: f64, limit: f64 },

    #[error("consistency check failed: {what} (discrepancy {value:e} > tolerance {tolerance:e})")]
    Consistency { what: String, value: f64, tolerance: f64 },

    #[error("structural fit failed: relative residual {residual:e} exceeds {tolerance:e}")]
    Structure { residual: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed operator file: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
