use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate sideband system at delta = {delta} (|det| = {det:e})")]
    DegenerateResponse { delta: f64, det: f64 },

    #[error("pole in printed response at delta = {delta}")]
    Pole { delta: f64 },

    #[error("transmission phase undefined at grid index {index} (delta = {delta}, |t_p| = {magnitude:e})")]
    PhaseUndefined {
        index: usize,
        delta: f64,
        magnitude: f64,
    },

    #[error("probe amplitude is zero; output field is undefined in solver mode")]
    ZeroProbe,

    #[error("trajectory diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    #[error("invalid demodulation window: {0}")]
    InvalidWindow(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics (poles, divergence, undefined
    /// phase) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateResponse { .. }
                | Error::Pole { .. }
                | Error::PhaseUndefined { .. }
                | Error::ZeroProbe
                | Error::Divergence { .. }
        )
    }
}
