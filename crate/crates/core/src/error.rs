use thiserror::Error;

/// A single violated parameter constraint, named the way it is written in
/// the inequality it guards.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Violation {
    pub constraint: String,
    pub detail: String,
}

impl Violation {
    pub fn new(constraint: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { constraint: constraint.into(), detail: detail.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.constraint, self.detail)
    }
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field sample {index} is not finite (divergent field)")]
    Divergent { index: usize },

    #[error("invalid exponent {0}: must be > 0 or infinity")]
    InvalidExponent(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field is identically zero on the grid")]
    ZeroField,

    #[error("size mismatch: expected {expected} samples, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),

    #[error("operator is not invertible: {0}")]
    NotInvertible(String),

    #[error("operator has no Hadamard constant (claimed_k unset): {0}")]
    MissingHadamardConstant(String),

    #[error("operator precondition: {0}")]
    OperatorPrecondition(String),

    #[error("parameter constraints violated: {}", join(.0))]
    Constraint(Vec<Violation>),

    #[error("test set is empty")]
    EmptyTestSet,

    #[error("Hermite index {index} exceeds the supported maximum {max}")]
    IndexTooLarge { index: usize, max: usize },

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("unknown family descriptor: {0}")]
    UnknownFamily(String),

    #[error("malformed field file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
