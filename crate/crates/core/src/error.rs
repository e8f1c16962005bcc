use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field configuration: {0}")]
    InvalidField(String),
    #[error("scalar does not belong to the configured field: {0}")]
    Malformed(String),
    #[error("residue of an element of negative valuation {0}")]
    NegativeValuation(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("residue value is not a root of the polynomial")]
    ResidueNonRoot,
    #[error("residue root is not simple")]
    NonSimpleRoot,
    #[error("{0} is divisible by the residue characteristic")]
    OrderDivisibleByP(u64),
    #[error("matrix determinant is not one")]
    DeterminantNotOne,
    #[error("expected {expected} input: {found}")]
    Precondition { expected: &'static str, found: String },
    #[error("element set is not closed under multiplication")]
    NotClosed,
    #[error("finite group of order {0} is outside the classification")]
    UnclassifiedGroup(usize),
    #[error("input contract violated: {0}")]
    ContractViolation(String),
    #[error("case unavailable for this field: {0}")]
    Unavailable(String),
    #[error("not realizable with exact quadratic carriers: {0}")]
    Unrealizable(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("document error: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
