use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not a prime modulus: {0}")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("missing differential at degree {0}")]
    MissingDifferential(i64),
    #[error("d∘d ≠ 0 between degrees {0} and {1}")]
    NotAComplex(i64, i64),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("category axiom violated: {0}")]
    CategoryViolation(String),
    #[error("linear category axiom violated: {0}")]
    LinearCategoryViolation(String),
    #[error("module axiom violated: {0}")]
    ModuleViolation(String),
    #[error("prestack axiom violated: {0}")]
    PrestackViolation(String),
    #[error("module is not fibered")]
    NotFibered,
    #[error("base category is not a poset")]
    NotAPoset,
    #[error("nerve degree {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },
    #[error("parse error at {path}: {message}")]
    ParseError { path: String, message: String },
    #[error("unsupported schema version {0}")]
    SchemaVersion(u32),
    #[error("validation error at {path}: {axiom}")]
    ValidationError { path: String, axiom: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
