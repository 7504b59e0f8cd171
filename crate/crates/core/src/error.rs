use crate::estimators::Method;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("empty sample")]
    EmptySample,
    #[error("sample of size {n} is too small for quantile order {p} (floor(n*p) = 0)")]
    SampleTooSmall { n: usize, p: f64 },
    #[error("probability {0} is outside (0, 1]")]
    InvalidProbability(f64),
    #[error("trimean weights out of range: alpha={alpha} must lie in [0, 1], p={p} in (0, 1/2)")]
    InvalidWeights { alpha: f64, p: f64 },
    #[error("quantile orders must be strictly increasing inside (0, 1)")]
    InvalidQuantileOrders,
    #[error("expected {expected} densities, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("density {0} is not strictly positive")]
    NonPositiveDensity(f64),
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("empty signal")]
    EmptySignal,
    #[error("signal contains a non-finite value at index {index}")]
    NonFiniteSample { index: usize },
    #[error("decomposition depth must be at least 1")]
    ZeroLevels,
    #[error("{levels} levels need at least 2^{levels} samples, signal has {n}")]
    TooManyLevels { levels: usize, n: usize },
    #[error("level {level} is outside 1..={levels}")]
    LevelOutOfRange { level: usize, levels: usize },
    #[error("detail vector for level {level} has length {got}, expected {expected}")]
    RaggedPyramid {
        level: usize,
        got: usize,
        expected: usize,
    },
    #[error("mid-energies need an even number of coefficients, got {0}")]
    OddLength(usize),
    #[error("group count {groups} does not divide {len} values")]
    IndivisibleGroups { groups: usize, len: usize },
    #[error("group count must be at least 1")]
    ZeroGroups,
    #[error("level range {lo}..={hi} is invalid for depth {levels}")]
    InvalidLevelRange { lo: usize, hi: usize, levels: usize },
    #[error("mid-energy values must be finite and non-negative")]
    InvalidMidEnergy,
    #[error("regression needs at least two distinct x values")]
    DegenerateRegression,
    #[error("non-finite regression response at level {level}")]
    NonFiniteResponse { level: usize },
    #[error("{0} is not a trimean method")]
    NotATrimean(Method),
    #[error("{0} is not a baseline method")]
    NotABaseline(Method),
}
