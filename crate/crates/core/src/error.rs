use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter outside the domain of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Configuration or experiment spec failed validation; one entry per offending field.
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("oracle state space has {states} states, exceeding the budget of {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("failed to parse spec: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
