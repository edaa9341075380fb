use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: schema violation: {message}")]
    Schema { path: String, message: String },

    #[error("{path}: satisfaction outside [0,1]: {value}")]
    SatisfactionOutOfRange { path: String, value: String },

    #[error("{path}: unknown item reference {item:?}")]
    UnknownItem { path: String, item: String },

    #[error("{path}: unknown user {user:?}")]
    UnknownUser { path: String, user: String },

    #[error("{path}: empty menu")]
    EmptyMenu { path: String },

    #[error("{path}: budget out of range: {budget} not in 1..={menu_len}")]
    BudgetOutOfRange {
        path: String,
        budget: usize,
        menu_len: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("profile space has {size} profiles, above the enumeration cap of {cap}")]
    CapExceeded { size: u128, cap: u128 },

    #[error("brute-force Shapley value is limited to {cap} players, got {players}")]
    BruteForceCap { players: usize, cap: usize },

    #[error("satisfaction vector must be non-decreasing with entries in [0,1]: {0}")]
    NonMonotone(String),

    #[error("linear solve failed: {0}")]
    Solver(String),

    #[error("stationary point for N={players} is infeasible: {reason}")]
    InfeasibleStationaryPoint { players: usize, reason: String },

    #[error("stationary point for N={players} is not a minimum: sampled utility {sampled} below {stationary}")]
    NotMinimal {
        players: usize,
        sampled: f64,
        stationary: f64,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}
