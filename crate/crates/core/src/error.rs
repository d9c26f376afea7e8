use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("no positive translation length (|trace| = {trace})")]
    NotHyperbolic { trace: f64 },

    #[error("curve {curve} not realized by a geodesic (|trace| = {trace})")]
    NotGeodesic { curve: String, trace: f64 },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("holonomy construction failed: relator residual {residual:e}")]
    Construction { residual: f64 },

    #[error("budget exhausted: last counts {last} and {previous} differ")]
    BudgetExhausted { last: usize, previous: usize },

    #[error("unsupported fast path: {0}")]
    UnsupportedFastPath(String),

    #[error("not a left-earthquake image: weight {weight:e} on {curve}")]
    NotLeftEarthquake { curve: String, weight: f64 },

    #[error("ill-conditioned Jacobian (condition estimate {condition:e})")]
    Conditioning { condition: f64 },

    #[error("non-filling or escaping minimum: {0}")]
    NonFilling(String),

    #[error("solver failure: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
