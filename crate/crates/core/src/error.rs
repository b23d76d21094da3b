use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime in the supported range 2..=61")]
    InvalidPrime(u32),
    #[error("unsupported dimension {0} (expected 1..=6)")]
    InvalidDimension(usize),
    #[error("dimension or modulus mismatch: {0}")]
    Mismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("zero has no square class")]
    ZeroResidue,
    #[error("modulus polynomial is not irreducible over GF({0})")]
    Reducible(u8),
    #[error("group order budget of {0} elements exceeded")]
    OrderBudget(usize),
    #[error("scan budget of {0} elements exceeded")]
    ScanBudget(u64),
    #[error("{0} does not divide the group order")]
    NotADivisor(u32),
    #[error("subgroup is not contained in the group")]
    NotContained,
    #[error("construction of case {case} failed at stage '{stage}'")]
    Construction { case: String, stage: String },
    #[error("unknown case id '{0}'")]
    UnknownCase(String),
    #[error("clique image not present in the enumeration (incomplete input)")]
    Integrity,
    #[error("spread set does not generate the group")]
    NotGenerating,
    #[error("invalid spread set: {0}")]
    InvalidSpreadSet(String),
    #[error("checkpoint '{name}' mismatch: expected {expected}, computed {computed}")]
    Checkpoint {
        name: String,
        expected: String,
        computed: String,
    },
    #[error("declared order {declared} does not match closure order {actual}")]
    DeclaredOrder { declared: usize, actual: usize },
    #[error("search node budget of {0} exceeded")]
    NodeBudget(u64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
