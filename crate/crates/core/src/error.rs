use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("number of variables must be between 1 and 8, got {0}")]
    VariableCount(usize),
    #[error("expected {expected} hex digits for {num_vars} variables, got {found}")]
    HexLength {
        expected: usize,
        found: usize,
        num_vars: usize,
    },
    #[error("invalid hex digit {0:?}")]
    HexDigit(char),
    #[error("hex value does not fit in {0} variables")]
    HexOverflow(usize),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("index sets {0} and {1} are not disjoint")]
    Overlap(String, String),
    #[error("invalid fan-in ({fanin1}, {fanin2}) at step {step}")]
    FaninOrder {
        step: usize,
        fanin1: usize,
        fanin2: usize,
    },
    #[error("output index {0} refers to a node that does not exist")]
    OutputIndex(usize),
    #[error("AND step {0} has an empty fan-in set")]
    EmptyFanin(usize),
    #[error("AND step {0} has identical fan-in sets")]
    DegenerateStep(usize),
    #[error("function must be normal (f(0) = 0)")]
    NotNormal,
    #[error("operation not applicable to the constant-0 function")]
    ConstantFunction,
    #[error("input assignment {0} is out of range or already constrained")]
    Assignment(u32),
    #[error("empty literal list")]
    EmptyLiterals,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("cardinality bound {bound} exceeds sorter width {width}")]
    CardinalityBound { bound: usize, width: usize },
    #[error("model does not cover variable {0}")]
    ModelVariable(u32),
    #[error("no network with at most {0} AND gates was found")]
    UpperBoundExceeded(usize),
    #[error("linear network cannot be scheduled into an acyclic XAG")]
    Schedule,
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no abstract XAG with {0} AND steps exists")]
    Infeasible(usize),
    #[error("too many indices for a 63-element index set ({0})")]
    TooManyIndices(usize),
}
