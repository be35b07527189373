use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate arrow id `{0}`")]
    DuplicateArrow(String),
    #[error("vertex {vertex} out of range (valid labels {first}..={last})")]
    VertexOutOfRange {
        vertex: i64,
        first: usize,
        last: usize,
    },
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("quiver has an oriented cycle; {0} requires an acyclic quiver or an explicit bound")]
    CyclicQuiver(&'static str),
    #[error("path is not composable: {0}")]
    NotComposable(String),
    #[error("objects live over different quivers")]
    QuiverMismatch,
    #[error("objects live over different fields ({0} vs {1})")]
    FieldMismatch(String, String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("group element is singular at vertex {0}")]
    SingularGroupElement(usize),
    #[error("{0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("operation needs a prime field representation")]
    NotPrimeField,
    #[error("value `{value}` cannot be represented in {field}")]
    NotInField { value: String, field: String },
    #[error("budget `{name}` exceeded: search needs {needed}, budget is {budget}")]
    BudgetExceeded {
        name: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("evaluated matrix is {rows}x{cols}, not square")]
    NonSquare { rows: usize, cols: usize },
    #[error("numerical condition fails for sigma #{sigma}: domain size {domain} vs codomain size {codomain}")]
    NumericalCondition {
        sigma: usize,
        domain: usize,
        codomain: usize,
    },
    #[error("weight needs both a positive and a negative entry to define maps in the sigma family")]
    DegenerateWeight,
    #[error("stable locus is empty for this dimension vector and weight")]
    EmptyStableLocus,
    #[error("generic ext recursion revisited ({0}) while it was still being computed")]
    RecursionCycle(String),
    #[error("summands are not pairwise distinct stables: hom({i},{j}) = {hom}")]
    NotDistinctStables { i: usize, j: usize, hom: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
