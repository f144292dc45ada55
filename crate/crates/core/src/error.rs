use thiserror::Error;

/// Errors raised by the simplex toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dimension must be at least {min}, got {actual}")]
    DimensionTooSmall { min: usize, actual: usize },

    #[error("dimension {requested} exceeds the configured cap {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("not a point of the standard simplex: {0}")]
    NotInSimplex(String),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid generator matrix: {0}")]
    InvalidGenerator(String),

    #[error("generator is reducible; its fixed point is not unique")]
    Reducible,

    #[error("generator does not converge to a unique fixed point: {0}")]
    NonConvergent(String),

    #[error("target is not a fixed point of the generator (residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("invalid temperature: {0}")]
    InvalidTemperature(String),

    #[error("energies must be nondecreasing")]
    UnsortedEnergies,

    #[error("zero-temperature limit is ambiguous: the two lowest energies coincide")]
    AmbiguousGroundState,

    #[error("fixed point must be strictly positive (entry {index} = {value})")]
    NonPositiveFixedPoint { index: usize, value: f64 },

    #[error("negative time or duration: {0}")]
    NegativeTime(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("GKSL operator does not leave diagonal matrices invariant")]
    InvariancePropertyViolated,

    #[error("tangential step leaves the simplex (min entry {min_entry:e}); decrease mu")]
    TangentExitsSimplex { min_entry: f64 },

    #[error("fixed point does not have a constant neighbour ratio")]
    NotEquidistant,

    #[error("steering failed: {0}")]
    Steering(String),
}

pub type Result<T> = std::result::Result<T, Error>;
