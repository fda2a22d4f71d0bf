use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported bound (q < 2^31)")]
    ModulusTooLarge(u64),
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("index subset is not contained in the ambient index set: {0}")]
    NotSubset(String),
    #[error("vertex {vertex} has degree {degree}, expected 3")]
    NotThreeRegular { vertex: usize, degree: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("twist violates the inverse condition on directed edge {edge}")]
    InvViolated { edge: usize },
    #[error("budget exceeded: {what} requires {required}, budget is {budget}")]
    BudgetExceeded {
        what: String,
        required: u128,
        budget: u128,
    },
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("not a coherent configuration: condition ({condition}) fails: {witness}")]
    NotCoherent { condition: u8, witness: String },
    #[error("span is not closed under multiplication: {0}")]
    NotClosed(String),
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vector is not a solution of the system")]
    NotASolution,
    #[error("group is not abelian")]
    NotAbelian,
    #[error("block index {index} out of range (cip has {blocks} blocks)")]
    BadBlock { index: usize, blocks: usize },
    #[error("field characteristic {q} divides the group order {order}")]
    CharacteristicDividesOrder { q: u32, order: u128 },
    #[error("system is not invariant under the group: {0}")]
    NotInvariant(String),
    #[error("invalid coloured index pair: {0}")]
    InvalidCip(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
