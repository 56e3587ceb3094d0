use thiserror::Error;

/// Errors raised by the algebraic layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported dimension {0} (supported range is 3..=8)")]
    UnsupportedDimension(usize),
    #[error("operation requires dimension {required}, found {found}")]
    WrongDimension { required: usize, found: usize },
    #[error("tensor is not an algebraic Weyl tensor (bianchi residual {bianchi:.3e}, trace residual {trace:.3e})")]
    NotWeyl { bianchi: f64, trace: f64 },
    #[error("eigenvalue triple {0:?} does not sum to zero")]
    NonZeroSumSpectrum([f64; 3]),
    #[error("matrix is not orthogonal with positive determinant")]
    NotRotation,
}

/// Errors raised when evaluating metrics and curvature on a chart.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("point {point:?} lies outside the coordinate box")]
    OutsideBox { point: Vec<f64> },
    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },
    #[error("metric is not symmetric at {point:?} (asymmetry {asymmetry:.3e})")]
    NotSymmetric { point: Vec<f64>, asymmetry: f64 },
    #[error("finite-difference step {step:e} underflows at {point:?}")]
    StepUnderflow { step: f64, point: Vec<f64> },
    #[error("metric produced a non-finite component at {point:?}")]
    NonFinite { point: Vec<f64> },
    #[error("{operation} requires dimension {required}, metric has dimension {found}")]
    WrongDimension {
        operation: &'static str,
        required: usize,
        found: usize,
    },
    #[error("unknown catalog metric '{0}'")]
    UnknownCatalogKey(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}
