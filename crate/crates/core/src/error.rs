use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("model: increment distribution has empty support")]
    EmptySupport,
    #[error("model: dimension mismatch (expected {expected}, got {got})")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("model: atom {atom}: {message}")]
    InvalidAtom { atom: usize, message: String },
    #[error("model: probabilities sum to {total}, expected exactly 1")]
    NotNormalized { total: String },
    #[error("model: covariance is singular, increments are not truly {0}-dimensional")]
    SingularCovariance(usize),
    #[error("model: sample point {point:?} has norm {norm} < irreducibility radius {radius}")]
    SampleTooClose { point: Vec<i64>, norm: f64, radius: f64 },
    #[error("model: sample point {0:?} is not in the cone")]
    SampleOutsideCone(Vec<i64>),
    #[error("model: {0}")]
    Parse(String),

    #[error("geometry: invalid cone: {0}")]
    InvalidCone(String),
    #[error("geometry: point {0:?} is outside the cone")]
    OutsideCone(Vec<f64>),
    #[error("geometry: cone is not in the reduite catalog: {0}")]
    NotCatalogued(String),
    #[error("geometry: direction {0:?} is not a unit vector on the boundary of the cone")]
    NotOnBoundary(Vec<f64>),

    #[error("kernel: start point {0:?} is not in the cone")]
    StartOutsideCone(Vec<i64>),
    #[error("kernel: window overflow at step {step}: clipped mass {clipped:e} exceeds tolerance {tolerance:e}")]
    WindowOverflow { step: usize, clipped: f64, tolerance: f64 },
    #[error("kernel: tail fit exponent {exponent} is not summable (must be <= {bound})")]
    NonSummableTailFit { exponent: f64, bound: f64 },

    #[error("harmonic: invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("asymptotics: lattice point {point:?} leaves the regime: {reason}")]
    PathLeavesRegime { point: Vec<i64>, reason: String },
    #[error("asymptotics: harness requires a half-space cone")]
    WrongConeVariant,
    #[error("asymptotics: unstopped mass {mass:e} at {point:?} exceeds {limit}")]
    UnstoppedMassTooLarge { point: Vec<i64>, mass: f64, limit: f64 },
    #[error("asymptotics: zero denominator G(x0, {0:?}) = 0")]
    ZeroDenominator(Vec<i64>),
    #[error("asymptotics: need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
}
