use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("rank-deficient basis (rank {rank}, expected {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("search space of {size} points exceeds the limit of {limit}")]
    SearchTooLarge { size: f64, limit: f64 },
    #[error("zero signal power")]
    ZeroPower,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal: {0}")]
    Internal(String),
}

impl Error {
    /// Process exit code: 1 for validation problems, 2 for internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Internal(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
