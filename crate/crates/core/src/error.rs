use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A checked machine-integer operation would have wrapped.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("integer overflow in {op} at entry ({row}, {col})")]
    MatrixOverflow {
        op: &'static str,
        row: usize,
        col: usize,
    },

    #[error("{0} is not invertible modulo {1}")]
    NotAUnit(u64, u64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("image list is not a bijection: {0}")]
    NotBijective(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("polynomial division is not exact")]
    InexactDivision,

    #[error("not realizable: {0}")]
    NotRealizable(String),

    #[error("enumeration cost {cost} exceeds budget {budget}")]
    BudgetExceeded { cost: u128, budget: u64 },

    /// A constructed object failed its own post-construction check.
    #[error("internal verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }

    /// Resource-class errors map to a distinct CLI exit status.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Overflow(_) | Error::MatrixOverflow { .. } | Error::BudgetExceeded { .. }
        )
    }
}
