use thiserror::Error;

/// Errors raised by the simulator, the estimators and the regulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("red duration {red} of queue {queue} must lie strictly inside (0, {cycle})")]
    InvalidRed { queue: usize, red: f64, cycle: f64 },

    #[error("cycle length of queue {queue} must be positive, got {cycle}")]
    InvalidCycle { queue: usize, cycle: f64 },

    #[error("horizon must be positive, got {0}")]
    InvalidHorizon(f64),

    #[error("invalid rate process: {0}")]
    InvalidRate(String),

    #[error("invalid service profile: {0}")]
    InvalidService(String),

    #[error("routing fraction phi must lie in [0, 1], got {0}")]
    InvalidPhi(f64),

    #[error("initial queue content must be nonnegative, got ({0}, {1})")]
    InvalidInitialState(f64, f64),

    #[error("integration window [{start}, {end}) is empty or outside [{lo}, {hi}]")]
    InvalidWindow { start: f64, end: f64, lo: f64, hi: f64 },

    #[error("event at {got} arrived after an event at {last}")]
    OutOfOrder { last: f64, got: f64 },

    #[error("busy start of queue 2 at {0} carries no trigger annotation")]
    MissingTrigger(f64),

    #[error("window length must be positive, got {0}")]
    InvalidWindowLength(f64),

    #[error("finite-difference step must be positive, got {0}")]
    InvalidStep(f64),

    #[error("perturbed red duration {value} of queue {queue} leaves (0, {cycle})")]
    PerturbationOutOfRange { queue: usize, value: f64, cycle: f64 },

    #[error("invalid on/off specification: {0}")]
    InvalidOnOff(String),

    #[error("invalid guard configuration: {0}")]
    InvalidGuards(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, key: Option<String>, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
