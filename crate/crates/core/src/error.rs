use thiserror::Error;

/// Errors raised while building codes or handling words.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("base {0} is not a prime")]
    NonPrimeBase(u32),

    #[error("digit {digit} is out of range for base {base}")]
    DigitOutOfRange { digit: u32, base: u8 },

    #[error("invalid digit character {0:?}")]
    InvalidChar(char),

    #[error("operands differ: base {lhs_base} vs {rhs_base}, length {lhs_len} vs {rhs_len}")]
    OperandMismatch {
        lhs_base: u8,
        rhs_base: u8,
        lhs_len: usize,
        rhs_len: usize,
    },

    #[error("index {index} does not fit in {len} base-{base} digits")]
    IndexOutOfRange { index: u64, base: u8, len: usize },

    #[error("expected {expected} symbols, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("residue must be nonzero")]
    ZeroResidue,

    #[error("message length {requested} exceeds capacity {capacity}")]
    CapacityExceeded { requested: usize, capacity: usize },

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("index set is not {order}-wise independent")]
    NotIndependent { order: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = CodeError> = std::result::Result<T, E>;
