//! Killed lattice random walks in convex cones.
//!
//! The crate evolves the law of a walk killed on leaving a cone, and
//! builds on it: survival probabilities, Green functions, the positive
//! harmonic function `V`, stopped functionals, and ratio series that
//! test the large-`|y|` behaviour of the Green function.
//!
//! Numerical kernels are generic over [`Scalar`]: `f64` and `f32` for
//! production runs, [`Rational`] for exact small-`n` computations.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod kernel;
pub mod lattice;
pub mod model;
pub mod sampler;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{ConeShape, ConeSpec, ReduiteEntry, ReduiteForm, TangentCone};
pub use kernel::{
    evolve, green, green_many, local_prob, stopped_functional, survival, survival_curve, time_reversal_check, Evolver,
    GreenConfig, GreenErrorFlag, GreenResult, MassTable, StoppedConfig, StoppedFunctionalResult, TailMethod,
    WindowPolicy,
};
pub use model::{validate_hypotheses, HypothesisReport, IncrementDistribution, WalkModel};
pub use scalar::{rational, CompensatedSum, Rational, Scalar};

/// Mass table in double precision.
pub type MassTable64 = MassTable<f64>;
/// Mass table with exact rational entries.
pub type ExactMassTable = MassTable<Rational>;
/// Double-precision evolver, the production engine.
pub type Evolver64 = Evolver<f64>;
/// Exact evolver for oracle-sized runs.
pub type ExactEvolver = Evolver<Rational>;
