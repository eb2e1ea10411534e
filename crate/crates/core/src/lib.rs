//! Particle swarm dynamics, stagnation bounds and first-hitting-time experiments.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`], [`objective`] and [`rng`] hold the shared vocabulary: validated
//!   parameter tuples, the benchmark objectives and a counter-based random
//!   stream whose draws are pure functions of their coordinates.
//! * [`engine`] simulates the Basic PSO (`delta = 0`) and the Noisy PSO
//!   (`delta > 0`) and tracks the first hitting time of an epsilon-ball.
//! * [`moments`] propagates first and second moments of the fixed-attractor
//!   recurrence exactly and exposes the closed-form limits.
//! * [`stagnation`] collects the two-particle stagnation bounds and the
//!   single-particle closed form.
//! * [`regions`] evaluates the convergence-region predicates and scans grids.
//! * [`experiments`] ties the theory to Monte Carlo simulation.
//!
//! Numerical code is generic over [`Scalar`]; the aliases below fix `f64`,
//! which is what the experiment harness uses.

pub mod engine;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod moments;
pub mod objective;
pub mod params;
pub mod quadrature;
pub mod regions;
pub mod rng;
pub mod scalar;
pub mod stagnation;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use engine::{Outcome, SwarmState, TrialResult};
pub use moments::{MomentLimits, MomentState, MomentTransition};
pub use objective::{Counterexample, Objective, ObjectiveKind, Sphere, SpherePlus};
pub use params::PsoParams;
pub use regions::RegionVerdict;
pub use rng::{Purpose, RngStream};
pub use stagnation::{StagnationVerdict, TwoParticleInit};

/// Parameters in double precision.
pub type Params = PsoParams<f64>;
/// Parameters in single precision.
pub type Params32 = PsoParams<f32>;
/// Swarm state in double precision.
pub type Swarm = SwarmState<f64>;
/// Swarm state in single precision.
pub type Swarm32 = SwarmState<f32>;
/// Moment vector in double precision.
pub type Moments = MomentState<f64>;
/// Moment transition matrix in double precision.
pub type Transition = MomentTransition<f64>;
/// Two-particle initial configuration in double precision.
pub type TwoParticles = TwoParticleInit<f64>;
/// Exact rational scalar used where a probability must come out exactly.
pub type Rational = num_rational::Ratio<i64>;
