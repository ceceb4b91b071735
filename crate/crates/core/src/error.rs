use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("coincident positions: {0}")]
    CoincidentPositions(String),

    #[error("task graph of user {user} contains a cycle")]
    CyclicGraph { user: usize },

    #[error("zero rate on required link: {0}")]
    ZeroRate(String),

    #[error("invalid decision: {0}")]
    InvalidDecision(String),

    #[error("invalid bandwidth allocation: {0}")]
    InvalidAllocation(String),

    #[error("state space of {size} decisions exceeds cap {cap}")]
    StateSpaceTooLarge { size: f64, cap: u64 },

    #[error("no energy-feasible decision exists")]
    NoFeasibleDecision,

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("missing axis coverage: {0}")]
    MissingCoverage(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    TomlDe(#[from] toml::de::Error),

    #[error(transparent)]
    TomlSer(#[from] toml::ser::Error),
}
