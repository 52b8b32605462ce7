use thiserror::Error;

/// Library-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid belief: {0}")]
    InvalidBelief(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("belief system is not Bayes-plausible at state `{state}`: posterior mass {got} vs prior {want}")]
    NotBayesPlausible { state: String, got: f64, want: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("scenario schema error at {at}: {msg}")]
    Schema { at: String, msg: String },

    #[error("no equilibrium-backed payoff at this grid: {0}")]
    NoPoolingPayoff(String),

    #[error("operation not supported for this scenario: {0}")]
    Unsupported(String),

    #[error("enumeration budget exceeded: needs about {required} evaluations, cap is {cap}")]
    BudgetExceeded { required: u128, cap: u128 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
