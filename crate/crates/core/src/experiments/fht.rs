//! First-hitting-time estimation with censoring.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::stats::{median, survival_curve, wilson_interval, WILSON_Z};
use crate::engine::{Outcome, SwarmState, TrialResult};
use crate::error::{Error, Result};
use crate::objective::ObjectiveKind;
use crate::params::PsoParams;
use crate::rng::RngStream;
use crate::scalar::Scalar;

pub const FHT_HEADER: &str = "trial,outcome,evals,final_g_value";

/// Rejection-sampling cap for Sphere⁺ initialisation.
pub const MAX_INIT_ATTEMPTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec<T> {
    /// Uniform on `[-α, α]`. For Sphere⁺ swarms without a particle in the
    /// positive region are rejected and redrawn.
    Random,
    /// Fixed positions and velocities, flattened row-major (`m * n`).
    Explicit {
        positions: Vec<T>,
        velocities: Vec<T>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig<T> {
    pub params: PsoParams<T>,
    pub objective: ObjectiveKind,
    pub init: InitSpec<T>,
    pub trials: u64,
    pub budget: u64,
    pub master_seed: u64,
}

impl<T: Scalar> ExperimentConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return Err(Error::param("trials", "at least one trial is required"));
        }
        if self.budget < self.params.m as u64 {
            return Err(Error::param(
                "budget",
                format!("must be at least m = {}", self.params.m),
            ));
        }
        if let InitSpec::Explicit {
            positions,
            velocities,
        } = &self.init
        {
            let want = self.params.m * self.params.n;
            for (len, name) in [
                (positions.len(), "positions"),
                (velocities.len(), "velocities"),
            ] {
                if len != want {
                    return Err(Error::param(
                        name,
                        format!("expected m*n = {want} values, got {len}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Initial swarm of trial `trial`.
    pub fn initial_swarm(&self, rng: &RngStream) -> Result<SwarmState<T>> {
        let f = &self.objective;
        match &self.init {
            InitSpec::Explicit {
                positions,
                velocities,
            } => {
                let mut s = SwarmState::from_explicit(
                    positions,
                    velocities,
                    self.params.m,
                    self.params.n,
                    f,
                )?;
                s.mark_initial_hits(&self.params, f);
                Ok(s)
            }
            InitSpec::Random if *f == ObjectiveKind::SpherePlus => {
                for attempt in 0..MAX_INIT_ATTEMPTS {
                    let s = SwarmState::init_attempt(&self.params, f, rng, attempt);
                    if s.global_best_value().is_finite() {
                        return Ok(s);
                    }
                }
                Err(Error::Precondition(
                    "no initial swarm with a particle in the positive region".into(),
                ))
            }
            InitSpec::Random => Ok(SwarmState::init(&self.params, f, rng)),
        }
    }

    pub fn run_trial(&self, trial: u64) -> Result<TrialResult<T>> {
        let rng = RngStream::new(self.master_seed, trial);
        let mut s = self.initial_swarm(&rng)?;
        Ok(s.run_until_hit(&self.params, &self.objective, self.budget, &rng))
    }

    /// Single traced trial for trajectory dumps.
    pub fn run_trial_traced(&self, trial: u64, sample_every: u64) -> Result<TrialResult<T>> {
        let rng = RngStream::new(self.master_seed, trial);
        let mut s = self.initial_swarm(&rng)?;
        Ok(s.run_until_hit_traced(
            &self.params,
            &self.objective,
            self.budget,
            &rng,
            sample_every,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: u64,
    pub outcome: Outcome,
    pub final_g_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FhtEstimate {
    pub trials: u64,
    pub hits: u64,
    pub censored: u64,
    /// Over hitting trials only; censored trials are never imputed.
    pub mean_over_hits: Option<f64>,
    pub median_over_hits: Option<f64>,
    pub survival_curve: Vec<(u64, f64)>,
    pub hit_probability_interval: (f64, f64),
    pub records: Vec<TrialRecord>,
}

impl FhtEstimate {
    pub fn from_records(records: Vec<TrialRecord>) -> Self {
        let trials = records.len() as u64;
        let hit_evals: Vec<u64> = records
            .iter()
            .filter(|r| r.outcome.is_hit())
            .map(|r| r.outcome.evals())
            .collect();
        let hits = hit_evals.len() as u64;
        let as_f64: Vec<f64> = hit_evals.iter().map(|&e| e as f64).collect();
        let mean_over_hits = if hits > 0 {
            Some(as_f64.iter().sum::<f64>() / hits as f64)
        } else {
            None
        };
        Self {
            trials,
            hits,
            censored: trials - hits,
            mean_over_hits,
            median_over_hits: median(&as_f64),
            survival_curve: survival_curve(&hit_evals, trials),
            hit_probability_interval: wilson_interval(hits, trials, WILSON_Z),
            records,
        }
    }
}

/// Runs all trials (in parallel on the current rayon pool) and aggregates
/// them in trial order.
pub fn estimate_fht<T: Scalar>(config: &ExperimentConfig<T>) -> Result<FhtEstimate> {
    config.validate()?;
    let records = (0..config.trials as usize)
        .into_par_iter()
        .map(|k| {
            let trial = k as u64;
            config.run_trial(trial).map(|r| TrialRecord {
                trial,
                outcome: r.outcome,
                final_g_value: r.final_g_value.to_f64_lossy(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FhtEstimate::from_records(records))
}

pub fn write_fht_csv(records: &[TrialRecord]) -> String {
    let mut out = String::with_capacity(40 * (records.len() + 1));
    out.push_str(FHT_HEADER);
    out.push('\n');
    for r in records {
        let outcome = if r.outcome.is_hit() {
            "hit"
        } else {
            "censored"
        };
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.trial,
            outcome,
            r.outcome.evals(),
            r.final_g_value
        );
    }
    out
}

/// `evals,survival` rows.
pub fn write_survival_csv(curve: &[(u64, f64)]) -> String {
    let mut out = String::from("evals,survival\n");
    for (e, s) in curve {
        let _ = writeln!(out, "{e},{s}");
    }
    out
}
