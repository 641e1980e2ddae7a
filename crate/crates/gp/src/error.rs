use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GpError {
    #[error("monomial coefficient must be positive and finite, got {0}")]
    NonPositiveCoefficient(f64),
    #[error("exponent must be finite, got {0}")]
    NonFiniteExponent(f64),
    #[error("dimension mismatch: expected {expected} variables, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("variable {index} must be strictly positive, got {value}")]
    NonPositiveVariable { index: usize, value: f64 },
    #[error("objective posynomial has no terms")]
    EmptyObjective,
    #[error("exponential overflow while evaluating (max exponent {0:.1}); rescale the problem")]
    ScaleOverflow(f64),
    #[error("equality constraints are inconsistent (residual {0:.3e})")]
    InconsistentEqualities(f64),
}
