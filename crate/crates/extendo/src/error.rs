use thiserror::Error;

/// Everything that can go wrong inside the pricing library.
///
/// The CLI maps these onto process exit codes: solver non-convergence is a
/// numeric failure (exit 3), everything else is an input problem (exit 2).
#[derive(Debug, Clone, Error)]
pub enum PricingError {
    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("curve horizon exceeded: requested {requested}, curve ends at {horizon}")]
    CurveHorizon { requested: f64, horizon: f64 },

    #[error("invalid contract: {0}")]
    InvalidContract(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported setting: {0}")]
    UnsupportedSetting(String),

    #[error("solver failed: {message} (last bracket [{lo}, {hi}])")]
    Solver { message: String, lo: f64, hi: f64 },
}

impl PricingError {
    pub fn is_numeric_failure(&self) -> bool {
        matches!(self, PricingError::Solver { .. })
    }
}

pub type Result<T> = std::result::Result<T, PricingError>;
