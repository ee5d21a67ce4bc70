use thiserror::Error;

/// Every failure the construction pipeline can report.
///
/// Variants are grouped by how a caller should react: input problems,
/// failed mathematical checks, and exhausted resources each map to a
/// distinct process exit code (see [`ForgeError::exit_code`]).
#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("insufficient depth: {required} partial quotients required, {available} materialized")]
    InsufficientDepth { required: usize, available: usize },

    #[error("depth exhausted: {0}")]
    DepthExhausted(String),

    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),

    #[error("horizon too small: {0}")]
    HorizonTooSmall(String),

    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("inconsistent parameters: {0}")]
    InconsistentParameters(String),

    #[error("construction invalid: {0}")]
    ConstructionInvalid(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("not in shift: {0}")]
    NotInShift(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ForgeError>;

impl ForgeError {
    /// 0 success, 1 check failure, 2 input error, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            ForgeError::InvalidInput(_) | ForgeError::Io(_) | ForgeError::Json(_) => 2,
            ForgeError::InsufficientDepth { .. }
            | ForgeError::DepthExhausted(_)
            | ForgeError::BudgetExhausted(_)
            | ForgeError::HorizonTooSmall(_)
            | ForgeError::Resource(_) => 3,
            ForgeError::InconsistentParameters(_)
            | ForgeError::ConstructionInvalid(_)
            | ForgeError::CheckFailed(_)
            | ForgeError::NotInShift(_)
            | ForgeError::Internal(_) => 1,
        }
    }
}
