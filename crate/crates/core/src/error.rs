use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransitError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("chessboard ratios infeasible: low-to-low density would be {0:.6e} < 0")]
    InfeasibleRatios(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("design does not match the grid: {0}")]
    DesignMismatch(String),
    #[error("design entry {name} must be strictly positive, got {value}")]
    NonPositiveDesign { name: String, value: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("scenario {scenario}: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<TransitError>,
    },
    #[error(transparent)]
    Gp(#[from] geoprog::GpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TransitError>;
