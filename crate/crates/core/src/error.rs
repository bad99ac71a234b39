use thiserror::Error;

/// Everything that can go wrong in this crate. Variants are contract
/// violations (bad inputs, exhausted precision budgets), never statistical
/// outcomes: a failed equidistribution test is a report with `pass = false`,
/// and an unsuccessful witness scan is an `Ok(None)`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime >= 3")]
    NotAPrime(u64),

    #[error("digit {digit} out of range for prime {p}")]
    DigitOutOfRange { p: u64, digit: u64 },

    #[error("precision exhausted: index {wanted} requested but only {available} digits are known")]
    PrecisionExhausted { wanted: usize, available: usize },

    #[error("window exhausted: index {index} outside known window [{lo}, {hi})")]
    WindowExhausted { index: i64, lo: i64, hi: i64 },

    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("all known digits are zero; valuation is undefined at this precision")]
    AllDigitsZero,

    #[error("not a unit: digit 0 is zero")]
    NotAUnit,

    #[error("residue {a} outside 1..={max}")]
    ResidueOutOfRange { a: u64, max: u64 },

    #[error("character index is the zero vector")]
    ZeroVector,

    #[error("character level {t} exceeds the cap {cap}")]
    LevelTooLarge { t: u32, cap: u32 },

    #[error("depth {depth} needs {cells} cells, over the {max} cell budget")]
    DepthTooLarge { depth: usize, cells: u128, max: u128 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("interval numerator {a} must be coprime to {p} and lie in (0, p^{depth})")]
    BadInterval { a: u64, p: u64, depth: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
