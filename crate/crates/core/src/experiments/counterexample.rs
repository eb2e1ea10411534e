//! Two particles on the counterexample objective: one sits on the optimum
//! with zero velocity, the other oscillates around the equilibrium between
//! its own best and the global best forever.

use rayon::prelude::*;

use super::stats::RunningMoments;
use crate::engine::SwarmState;
use crate::error::{Error, Result};
use crate::moments::{equilibrium_point, variance_limit, MomentTransition};
use crate::objective::Counterexample;
use crate::params::PsoParams;
use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleConfig {
    /// Basic PSO parameters; `m` and `n` are forced to 2 and 1.
    pub params: PsoParams<f64>,
    pub trials: u64,
    pub steps: u64,
    /// Trailing steps whose positions enter the variance estimate.
    pub window: u64,
    pub master_seed: u64,
}

impl CounterexampleConfig {
    pub fn standard(trials: u64, steps: u64, window: u64, master_seed: u64) -> Self {
        Self {
            params: PsoParams::new(0.4, 1.5, 1.5, 0.0, 1.0, 1e-12, 2, 1).expect("valid constants"),
            trials,
            steps,
            window,
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub trials: u64,
    pub steps: u64,
    /// Personal-best updates of the second particle summed over trials.
    pub pbest_updates_particle2: u64,
    /// Trials in which the first particle ever left `(0, 0)`.
    pub particle1_moved: u64,
    /// Trials in which `(G − P(2))²` ever differed from 1.
    pub spread_changed: u64,
    /// Pooled positions of particle 2 over the trailing window.
    pub window_moments: RunningMoments,
    pub equilibrium: f64,
    /// Fixed point of the exact moment recurrence with `P = 1`, `G = 0`.
    pub oracle_variance: f64,
    pub closed_form_variance: f64,
}

impl CounterexampleReport {
    pub fn variance_rel_error(&self) -> f64 {
        (self.window_moments.variance() - self.oracle_variance).abs() / self.oracle_variance
    }
}

struct Trial {
    updates: u64,
    moved: bool,
    spread_changed: bool,
    window: RunningMoments,
}

pub fn counterexample_demo(cfg: &CounterexampleConfig) -> Result<CounterexampleReport> {
    let params = PsoParams {
        m: 2,
        n: 1,
        ..cfg.params
    };
    params.validate()?;
    if params.is_noisy() {
        return Err(Error::param(
            "delta",
            "the counterexample runs the Basic PSO (delta = 0)",
        ));
    }
    if cfg.window > cfg.steps {
        return Err(Error::param("window", "must not exceed steps"));
    }
    let f = Counterexample;
    let start_window = cfg.steps - cfg.window;
    let trials: Vec<Trial> = (0..cfg.trials as usize)
        .into_par_iter()
        .map(|k| {
            let rng = RngStream::new(cfg.master_seed, k as u64);
            let mut s =
                SwarmState::from_explicit(&[0.0, 1.0], &[0.0, 0.0], 2, 1, &f).expect("fixed shape");
            let mut out = Trial {
                updates: 0,
                moved: false,
                spread_changed: false,
                window: RunningMoments::new(),
            };
            for t in 1..=cfg.steps {
                s.step(&params, &f, &rng);
                if s.position(0)[0] != 0.0 || s.velocity(0)[0] != 0.0 {
                    out.moved = true;
                }
                let d = s.global_best()[0] - s.personal_best(1)[0];
                if d * d != 1.0 {
                    out.spread_changed = true;
                }
                if t > start_window {
                    out.window.push(s.position(1)[0]);
                }
            }
            out.updates = s.improvements()[1];
            out
        })
        .collect();

    let mut window_moments = RunningMoments::new();
    let (mut updates, mut moved, mut changed) = (0, 0, 0);
    for t in &trials {
        updates += t.updates;
        moved += t.moved as u64;
        changed += t.spread_changed as u64;
        window_moments.merge(&t.window);
    }
    let oracle = MomentTransition::new(&params, 1.0, 0.0).fixed_point()?;
    Ok(CounterexampleReport {
        trials: cfg.trials,
        steps: cfg.steps,
        pbest_updates_particle2: updates,
        particle1_moved: moved,
        spread_changed: changed,
        window_moments,
        equilibrium: equilibrium_point(&params, 1.0, 0.0)?,
        oracle_variance: oracle.variance(),
        closed_form_variance: variance_limit(&params, 1.0, 0.0)?,
    })
}
