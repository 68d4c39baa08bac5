use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("coincident nodes: elevation angle undefined")]
    CoincidentNodes,
    #[error("degenerate link: zero distance between transmitter and receiver")]
    DegenerateLink,
    #[error("{what} did not converge: {detail}")]
    NonConvergence { what: &'static str, detail: String },
    #[error("Mellin-Barnes contour cannot separate the gamma pole families: {0}")]
    ContourFailure(String),
    #[error("amplify-and-forward relay has zero input power")]
    DeadInput,
    #[error("infeasible delay threshold {0} (must be > 0)")]
    InfeasibleDelay(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown preset case {0} (expected 1, 2 or 3)")]
    UnknownCase(u8),
    #[error("every realization hit the zero-capacity sentinel")]
    AllOutage,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by bad input rather than numerical trouble.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::InvalidParameter(_)
                | Error::UnknownCase(_)
                | Error::Io(_)
                | Error::Json(_)
                | Error::InfeasibleDelay(_)
                | Error::CoincidentNodes
                | Error::DegenerateLink
        )
    }
}
