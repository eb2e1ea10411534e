//! Monte Carlo experiments tying the closed forms to simulation.
//!
//! Every experiment is a pure function of its configuration and master seed.
//! Trials run on the current rayon pool and are reduced in trial order, so
//! reports are identical for any thread count.

pub mod counterexample;
pub mod fht;
pub mod pbest;
pub mod stagnation_demo;
pub mod stationary;
pub mod stats;

pub use counterexample::{counterexample_demo, CounterexampleConfig, CounterexampleReport};
pub use fht::{
    estimate_fht, write_fht_csv, write_survival_csv, ExperimentConfig, FhtEstimate, InitSpec,
    TrialRecord, FHT_HEADER,
};
pub use pbest::{pbest_null_sequence_check, PbestConfig, PbestReport};
pub use stagnation_demo::{
    bad_init_demo, stagnation_demo_two_particles, BadInitConfig, BadInitReport, DistanceCheckpoint,
    TwoParticleDemoConfig, TwoParticleDemoReport,
};
pub use stationary::{
    delta_tail_probability, improvement_probability_check, sigma_y_grid_check,
    stationary_moment_check, ImprovementConfig, ImprovementReport, SigmaYGridReport,
    StationaryConfig, StationaryReport,
};
pub use stats::{median, quantile, survival_curve, wilson_interval, RunningMoments, WILSON_Z};
