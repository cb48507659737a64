use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("particle count must be at least 1")]
    EmptyEnsemble,

    #[error("amplitudes are not normalizable: |c+|^2 + |c-|^2 = {norm_sq}")]
    NotNormalizable { norm_sq: f64 },

    #[error("sector index k = {k} outside 0..={n}")]
    IndexOutOfRange { k: u64, n: u64 },

    #[error("sector table for N = {n} exceeds the limit of {limit}; use pointwise log weights")]
    TableTooLarge { n: u64, limit: u64 },

    #[error("dense oracle supports N <= {limit}, got N = {n}")]
    OracleTooLarge { n: u64, limit: u64 },

    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    #[error("truncation window is empty for N = {n}, p = {p}, epsilon = {epsilon}")]
    EmptyWindow { n: u64, p: f64, epsilon: f64 },

    #[error("scaling fit needs at least {min} points, got {got}")]
    TooFewPoints { got: usize, min: usize },

    #[error("scaling fit needs positive values, got {value} at n = {n}")]
    NonPositiveValue { n: u64, value: f64 },

    #[error("grid point n = {0} appears more than once")]
    DuplicateGridPoint(u64),

    #[error("shot count must be at least 1")]
    NoShots,

    #[error("sampling work N * shots = {work} exceeds budget {budget}")]
    WorkBudgetExceeded { work: u128, budget: u128 },
}

impl Error {
    /// Size limits that a caller can avoid by choosing a different route.
    pub fn is_guard(&self) -> bool {
        matches!(
            self,
            Error::TableTooLarge { .. }
                | Error::OracleTooLarge { .. }
                | Error::WorkBudgetExceeded { .. }
        )
    }
}
