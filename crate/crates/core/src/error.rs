use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("agent {agent} out of range for {n} agents")]
    AgentOutOfRange { agent: usize, n: usize },

    #[error("coalition index {index} out of range for {n} agents")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("agent {0} appears more than once in a joint deviation")]
    DuplicateAgent(usize),

    #[error("no internal edge in the given agent set")]
    NoInternalEdge,

    #[error("operation requires an unweighted graph (all edge weights equal to 1)")]
    WeightedInput,

    #[error("k = {k} out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },

    #[error("search examined more than {limit} candidate deviations (guard limit)")]
    GuardExceeded { limit: u64 },

    #[error("{n} agents exceeds the enumeration cap of {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("scripted step {step}: {message}")]
    NonImprovingMove { step: usize, message: String },

    #[error("leftover agent {0} has no allowed anchor")]
    EmptyAllowedSet(usize),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid instance parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// `true` for the errors raised by size guards rather than bad input.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::GuardExceeded { .. } | Error::CapExceeded { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
