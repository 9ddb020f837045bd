use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The leading coefficient of the β triangular systems is numerically zero.
    #[error("degenerate beta system: |lambda_plus[{index}]| = {value:e} is below tolerance {tolerance:e}")]
    DegenerateBeta {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    /// A mode evolution would exceed the representable range of `f64`.
    ///
    /// `log_modulus` is the predicted natural-log growth of the mode; `xi` is
    /// filled in by callers that know which frequency was being evolved.
    #[error("mode overflow{}: predicted log-modulus {log_modulus:.3} exceeds {limit}", xi.map(|x| format!(" at xi = {x}")).unwrap_or_default())]
    ModeOverflow {
        xi: Option<f64>,
        log_modulus: f64,
        limit: f64,
    },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    /// Attach the offending frequency to a [`Error::ModeOverflow`].
    pub fn at_xi(self, at: f64) -> Self {
        match self {
            Error::ModeOverflow {
                log_modulus, limit, ..
            } => Error::ModeOverflow {
                xi: Some(at),
                log_modulus,
                limit,
            },
            other => other,
        }
    }
}
