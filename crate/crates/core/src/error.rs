use thiserror::Error;

use crate::correlators::CorrelatorKey;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series ring mismatch: operands were built over different configurations")]
    ConfigMismatch,

    #[error("invalid series ring configuration: {0}")]
    InvalidConfig(String),

    #[error("element is not a unit of the local ring (constant term is zero)")]
    NonUnit,

    #[error("logarithm requires constant term 1, found {0}")]
    LogNonUnit(String),

    #[error("division by zero in Q(zeta_12)")]
    DivisionByZero,

    #[error("evaluation at q = 0 with negative exponents present")]
    EvalAtZero,

    #[error("pole at {0} is not a root of unity representable in Q(zeta_12)")]
    UnrepresentablePole(String),

    #[error("function has a pole at the requested point {0}")]
    PoleAtPoint(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("unstable correlator requested: genus {genus}, {points} marked points")]
    Unstable { genus: u32, points: usize },

    #[error("missing correlator table entries:\n{}", format_keys(.0))]
    MissingEntries(Vec<CorrelatorKey>),

    #[error("geometric-slot resummation did not stabilise within {0} terms")]
    ResummationUnstable(usize),

    #[error("tau iteration failed to converge within {0} iterations")]
    NoConvergence(usize),

    #[error("fixed point check failed: tbar_{level}(1) has filtration order {order}, expected > {truncation}")]
    FixedPointResidual {
        level: usize,
        order: String,
        truncation: u32,
    },

    #[error("matrix is not invertible over the local ring")]
    SingularMatrix,

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("table error: {0}")]
    Table(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_keys(keys: &[CorrelatorKey]) -> String {
    keys.iter()
        .map(|k| format!("  {k}"))
        .collect::<Vec<_>>()
        .join("\n")
}
