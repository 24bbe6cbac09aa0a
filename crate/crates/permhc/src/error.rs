use thiserror::Error;

/// Errors reported across the crate. Internal invariant violations get their
/// own variant so the CLI can map them to a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    BadExtensionDegree,
    #[error("field cardinality p^ell does not fit in 64 bits")]
    FieldTooLarge,
    #[error("division by zero in the field")]
    ZeroInverse,
    #[error("operands belong to different field contexts")]
    FieldMismatch,
    #[error("series truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("residue for field element index {0} is missing")]
    MissingResidue(u64),
    #[error("residue has degree {got}, expected degree < {order}")]
    ResidueDegree { got: usize, order: usize },
    #[error("matrix dimension mismatch: {0}")]
    Dimension(String),
    #[error("brute-force strategy capped at n <= {cap}, got n = {n}")]
    BruteCap { n: usize, cap: usize },
    #[error("integer oracle capped at n <= {cap}, got n = {n}")]
    IntCap { n: usize, cap: usize },
    #[error("cofactor {b} does not divide q - 1 = {qm1}")]
    BadCofactor { b: u64, qm1: u64 },
    #[error("no valid cofactor b >= 2 divides q - 1 = {0}")]
    NoValidCofactor(u64),
    #[error("curve degree u = (q-1)/b - 1 must be at least 1 (q = {q}, b = {b})")]
    DegenerateCurve { q: u64, b: u64 },
    #[error("field of size {q} too small: need at least {need}")]
    FieldTooSmall { q: u64, need: u64 },
    #[error("order r = {r} out of range 1..={k}")]
    BadOrder { r: usize, k: usize },
    #[error("evaluator is bound to a different base point")]
    BasePointMismatch,
    #[error("strict mode requires {0}")]
    Strict(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
