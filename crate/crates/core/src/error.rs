use thiserror::Error;

/// Errors raised anywhere in the solver kit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no matching saturates every row")]
    NoPerfectMatching,

    #[error("insufficient drivers: need {needed}, have {available}")]
    InsufficientDrivers { needed: usize, available: usize },

    #[error("explicit scenarios have different sizes")]
    NonUniformScenarios,

    #[error("enumeration of {count} evaluations exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("bad scenario distribution: {0}")]
    BadDistribution(String),

    #[error("surplus is {0}, expected zero")]
    SurplusNotZero(i64),

    #[error("surplus {surplus} is not smaller than the scenario size {k}")]
    SurplusTooLarge { surplus: i64, k: usize },

    #[error("negative surplus {0}")]
    NegativeSurplus(i64),

    #[error("vertices {0} and {1} are disconnected")]
    DisconnectedVertices(usize, usize),

    #[error("malformed triples: {0}")]
    MalformedTriples(String),

    #[error("universe element {0} is not covered by any set")]
    UncoveredElement(usize),

    #[error("2-partition needs an even number of values, got {0}")]
    OddCardinality(usize),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no pickups in the requested window")]
    EmptyWindow,

    #[error("wrong scenario model: {0}")]
    WrongScenarioModel(&'static str),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short stable name, used by the CLI and the C interface.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NoPerfectMatching => "NoPerfectMatching",
            Error::InsufficientDrivers { .. } => "InsufficientDrivers",
            Error::NonUniformScenarios => "NonUniformScenarios",
            Error::EnumerationTooLarge { .. } => "EnumerationTooLarge",
            Error::BadDistribution(_) => "BadDistribution",
            Error::SurplusNotZero(_) => "SurplusNotZero",
            Error::SurplusTooLarge { .. } => "SurplusTooLarge",
            Error::NegativeSurplus(_) => "NegativeSurplus",
            Error::DisconnectedVertices(..) => "DisconnectedVertices",
            Error::MalformedTriples(_) => "MalformedTriples",
            Error::UncoveredElement(_) => "UncoveredElement",
            Error::OddCardinality(_) => "OddCardinality",
            Error::Parse { .. } => "ParseError",
            Error::EmptyWindow => "EmptyWindow",
            Error::WrongScenarioModel(_) => "WrongScenarioModel",
            Error::InvalidInstance(_) => "InvalidInstance",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
