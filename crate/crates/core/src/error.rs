use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid limits: {0}")]
    InvalidLimits(String),
    #[error("invalid decision grid: {0}")]
    InvalidGrid(String),
    /// A NaN or infinite value where a finite one is required.
    #[error("non-finite {0}")]
    NonFinite(&'static str),
    /// The state violates its limits, or its jerk window is empty.
    #[error("inadmissible state")]
    InadmissibleState,
    /// No acceleration setpoint keeps the joint within its limits.
    #[error("infeasible state")]
    InfeasibleState,
    #[error("empty trajectory")]
    EmptyTrajectory,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("config: {0}")]
    Config(String),
    #[error("output: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
