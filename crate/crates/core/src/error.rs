use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u64),
    #[error("extension degree {0} is outside 1..={max}", max = crate::gf::MAX_DEGREE)]
    DegreeTooLarge(usize),
    #[error("operands live in different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("GF({p}^{from}) is not a subfield of GF({p}^{to})")]
    NotASubfield { p: u32, from: usize, to: usize },
    #[error("Witt vectors of length {n} over p = {p} are beyond the supported size")]
    LengthTooLarge { p: u32, n: usize },
    #[error("operands live in different Witt rings")]
    MixedRings,
    #[error("group of order {order} exceeds the enumeration bound {bound}")]
    GroupTooLarge { order: u64, bound: u64 },
    #[error("the given elements do not form a subgroup of the group")]
    NotASubgroup,
    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
    #[error("the reduction is not totally ramified")]
    NotTotallyRamified,
    #[error("unsupported group shape: {0}")]
    UnsupportedShape(String),
    #[error("series truncation {x} exceeds the bound {max}")]
    TruncationTooLarge { x: usize, max: usize },
    #[error("invalid datum: {0}")]
    InvalidDatum(String),
    #[error("outside the supported setting: {0}")]
    OutOfSetting(String),
}

pub type Result<T> = std::result::Result<T, Error>;
