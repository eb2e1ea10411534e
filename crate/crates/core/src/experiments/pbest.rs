//! Convergence of personal bests towards the global best on Sphere⁺.

use rayon::prelude::*;

use super::stats::{median, quantile};
use crate::engine::SwarmState;
use crate::error::{Error, Result};
use crate::objective::SpherePlus;
use crate::params::PsoParams;
use crate::rng::RngStream;

/// Rejection cap for drawing an all-positive initial swarm.
const MAX_ATTEMPTS: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq)]
pub struct PbestConfig {
    pub params: PsoParams<f64>,
    pub trials: u64,
    pub horizon: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PbestReport {
    /// `max_i ‖G − P(i)‖²` at `t = 0` per trial.
    pub initial: Vec<f64>,
    /// The same at the horizon.
    pub final_spread: Vec<f64>,
    /// Per-trial `final / initial` (0 when the initial spread is 0).
    pub ratios: Vec<f64>,
}

impl PbestReport {
    pub fn median_ratio(&self) -> Option<f64> {
        median(&self.ratios)
    }

    pub fn ratio_quantiles(&self) -> Option<[f64; 3]> {
        Some([
            quantile(&self.ratios, 0.25)?,
            quantile(&self.ratios, 0.5)?,
            quantile(&self.ratios, 0.75)?,
        ])
    }
}

fn spread(s: &SwarmState<f64>) -> f64 {
    let g = s.global_best();
    (0..s.swarm_size())
        .map(|i| {
            s.personal_best(i)
                .iter()
                .zip(g)
                .map(|(p, g)| (g - p) * (g - p))
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

fn positive_swarm(params: &PsoParams<f64>, rng: &RngStream) -> Result<SwarmState<f64>> {
    for attempt in 0..MAX_ATTEMPTS {
        let s = SwarmState::init_attempt(params, &SpherePlus, rng, attempt);
        if s.positions().iter().all(|&x| x > 0.0) {
            return Ok(s);
        }
    }
    Err(Error::Precondition(
        "no all-positive initial swarm found".into(),
    ))
}

pub fn pbest_null_sequence_check(cfg: &PbestConfig) -> Result<PbestReport> {
    cfg.params.validate()?;
    let per_trial: Vec<(f64, f64)> = (0..cfg.trials as usize)
        .into_par_iter()
        .map(|k| {
            let rng = RngStream::new(cfg.master_seed, k as u64);
            let mut s = positive_swarm(&cfg.params, &rng)?;
            let initial = spread(&s);
            for _ in 0..cfg.horizon {
                if s.is_frozen(&cfg.params) {
                    break;
                }
                s.step(&cfg.params, &SpherePlus, &rng);
            }
            Ok((initial, spread(&s)))
        })
        .collect::<Result<_>>()?;
    let ratios = per_trial
        .iter()
        .map(|&(a, b)| if a == 0.0 { 0.0 } else { b / a })
        .collect();
    Ok(PbestReport {
        initial: per_trial.iter().map(|p| p.0).collect(),
        final_spread: per_trial.iter().map(|p| p.1).collect(),
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_has_no_spread() {
        let params = PsoParams::new(0.4, 1.5, 1.5, 0.0, 1.0, 1e-12, 1, 1).unwrap();
        let r = pbest_null_sequence_check(&PbestConfig {
            params,
            trials: 5,
            horizon: 100,
            master_seed: 1,
        })
        .unwrap();
        assert!(r.initial.iter().chain(&r.final_spread).all(|&v| v == 0.0));
    }

    #[test]
    fn basic_swarm_spread_shrinks() {
        let params = PsoParams::new(0.4, 1.5, 1.5, 0.0, 1.0, 1e-300, 3, 1).unwrap();
        let r = pbest_null_sequence_check(&PbestConfig {
            params,
            trials: 20,
            horizon: 5_000,
            master_seed: 2,
        })
        .unwrap();
        assert!(r.initial.iter().all(|&v| v > 0.0));
        assert!(r.median_ratio().unwrap() < 1e-4);
    }

    #[test]
    fn noisy_swarm_spread_shrinks() {
        let params = PsoParams::new(0.4, 1.5, 1.5, 0.01, 1.0, 1e-300, 3, 1).unwrap();
        let r = pbest_null_sequence_check(&PbestConfig {
            params,
            trials: 20,
            horizon: 20_000,
            master_seed: 4,
        })
        .unwrap();
        assert!(
            r.median_ratio().unwrap() < 1e-2,
            "{:?}",
            r.ratio_quantiles()
        );
    }
}
