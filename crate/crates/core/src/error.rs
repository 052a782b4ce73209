use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by model construction, quadrature and simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("argument {value} outside the domain of {what}")]
    Domain { what: &'static str, value: f64 },

    #[error("density not localized after widening the window to [{lo}, {hi}]")]
    NotLocalized { lo: f64, hi: f64 },

    #[error("potential does not confine: {0}")]
    NotConfined(String),

    #[error("replica {replica} produced a non-finite state at step {step}: {state:?}")]
    NonFinite { replica: u64, step: u64, state: Vec<f64> },

    #[error("replica {replica} left the spring domain at step {step} (separation {separation})")]
    SpringDomainExit { replica: u64, step: u64, separation: f64 },

    #[error("invalid bracket [{lo}, {hi}]: velocity {v_lo} at lo, {v_hi} at hi")]
    InvalidBracket { lo: f64, hi: f64, v_lo: f64, v_hi: f64 },

    #[error("post-burn-in window {window} is shorter than the required {required} fast time units")]
    WindowTooShort { window: f64, required: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
