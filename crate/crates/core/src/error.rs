use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points must have at least one coordinate")]
    EmptyPoint,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFiniteCoordinate { index: usize, value: f64 },

    #[error("duplicate atom at positions {first} and {second} in a configuration required to be simple")]
    DuplicateAtom { first: usize, second: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid weight {value} at index {index}")]
    InvalidWeight { index: usize, value: f64 },

    #[error("measure has empty support")]
    EmptySupport,

    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },

    #[error("invalid count distribution: {0}")]
    InvalidCountDistribution(String),

    #[error("brute force limited to {cap} points, got {n}")]
    CardinalityCap { n: usize, cap: usize },

    #[error("pair {index} has infinite cost")]
    InfinitePair { index: usize },

    #[error("input is not sorted at index {index}")]
    Unsorted { index: usize },

    #[error("operation requires one-dimensional data, got dimension {0}")]
    NotOneDimensional(usize),

    #[error("point map undefined at atom {index}")]
    MapUndefined { index: usize },

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("intensity mass must be positive, got {0}")]
    NonPositiveMass(f64),

    #[error("intensity must have unit mass, got {0}")]
    NonUnitMass(f64),

    #[error("missing stratum n = {n} with weight {weight}")]
    MissingStratum { n: usize, weight: f64 },

    #[error("empty sample list")]
    EmptySamples,

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("shift is unbounded on the support")]
    UnboundedShift,

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("intensity sampler failed: {0}")]
    Sampler(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
