//! Simulation counterparts of the stagnation results: the lone particle with
//! a bad start and the two-particle swarm driven by the social term only.

use rayon::prelude::*;

use super::fht::{estimate_fht, ExperimentConfig, FhtEstimate, InitSpec};
use super::stats::RunningMoments;
use crate::engine::SwarmState;
use crate::error::{Error, Result};
use crate::objective::{ObjectiveKind, Sphere};
use crate::params::PsoParams;
use crate::rng::RngStream;
use crate::stagnation::{
    bad_init_event, bad_init_event_sufficient, check_two_particle_stagnation,
    d_abs_expectation_bound, d_abs_expectation_bound_abs, one_particle_limit,
    one_particle_trajectory, velocity_sum_bound, StagnationVerdict, TwoParticleInit,
};

/// Lone particle on the 1-D sphere started at `x0` with velocity `v0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BadInitConfig {
    pub omega: f64,
    /// Acceleration coefficients; they do not influence the trajectory while
    /// `P = G = X`, which holds as long as the particle keeps improving.
    pub phi: f64,
    pub x0: f64,
    pub v0: f64,
    /// Search-space radius: the ball is `[−εα, εα]`.
    pub epsilon: f64,
    pub alpha: f64,
    /// Steps compared against the closed form.
    pub compare_steps: u32,
    pub trials: u64,
    pub budget: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BadInitReport {
    pub event_as_printed: bool,
    pub event_sufficient: bool,
    pub limit: f64,
    pub radius: f64,
    pub max_rel_error_x: f64,
    pub max_rel_error_v: f64,
    pub min_position: f64,
    pub fht: FhtEstimate,
}

impl BadInitReport {
    pub fn all_censored(&self) -> bool {
        self.fht.hits == 0
    }
}

impl BadInitConfig {
    fn params(&self) -> Result<PsoParams<f64>> {
        let r = self.epsilon * self.alpha;
        PsoParams::new(self.omega, self.phi, self.phi, 0.0, self.alpha, r * r, 1, 1)
    }
}

pub fn bad_init_demo(cfg: &BadInitConfig) -> Result<BadInitReport> {
    let params = cfg.params()?;
    let radius = cfg.epsilon * cfg.alpha;
    let rng = RngStream::new(cfg.master_seed, 0);
    let mut s = SwarmState::from_explicit(&[cfg.x0], &[cfg.v0], 1, 1, &Sphere)?;
    let (mut err_x, mut err_v, mut min_x) = (0.0f64, 0.0f64, cfg.x0);
    for t in 1..=cfg.compare_steps {
        s.step(&params, &Sphere, &rng);
        let (x, v) = one_particle_trajectory(cfg.x0, cfg.v0, cfg.omega, t);
        let (xs, vs) = (s.positions()[0], s.velocities()[0]);
        err_x = err_x.max(rel_err(xs, x));
        err_v = err_v.max(rel_err(vs, v));
        min_x = min_x.min(xs);
    }
    let fht = estimate_fht(&ExperimentConfig {
        params,
        objective: ObjectiveKind::Sphere,
        init: InitSpec::Explicit {
            positions: vec![cfg.x0],
            velocities: vec![cfg.v0],
        },
        trials: cfg.trials,
        budget: cfg.budget,
        master_seed: cfg.master_seed,
    })?;
    Ok(BadInitReport {
        event_as_printed: bad_init_event(cfg.x0, cfg.v0, cfg.omega, cfg.epsilon, cfg.alpha),
        event_sufficient: bad_init_event_sufficient(
            cfg.x0,
            cfg.v0,
            cfg.omega,
            cfg.epsilon,
            cfg.alpha,
        ),
        limit: one_particle_limit(cfg.x0, cfg.v0, cfg.omega),
        radius,
        max_rel_error_x: err_x,
        max_rel_error_v: err_v,
        min_position: min_x,
        fht,
    })
}

fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

/// Two particles on the 1-D sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleDemoConfig {
    /// `epsilon` is read as the search-space radius of the ball `[−ε, ε]`.
    pub params: PsoParams<f64>,
    pub init: TwoParticleInit<f64>,
    pub trials: u64,
    pub steps: u64,
    /// Times at which `|D_t| = |X_t(2) − X_t(1)|` is sampled.
    pub checkpoints: Vec<u64>,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCheckpoint {
    pub t: u64,
    pub abs_distance: RunningMoments,
    pub bound: f64,
    pub bound_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoParticleDemoReport {
    pub verdict: StagnationVerdict<f64>,
    pub trials: u64,
    pub steps: u64,
    /// Trials in which some position entered `[−ε, ε]`.
    pub entered: u64,
    pub min_position: f64,
    /// `Σ_{t≤steps} |V_t|` per particle across trials.
    pub velocity_sums: [RunningMoments; 2],
    pub velocity_sum_bound: Option<f64>,
    pub checkpoints: Vec<DistanceCheckpoint>,
    /// Trials that froze (all velocities exactly zero) before `steps`.
    pub frozen: u64,
}

impl TwoParticleDemoReport {
    /// Both per-particle mean velocity sums lie below the bound plus three
    /// standard errors.
    pub fn velocity_sums_within_bound(&self) -> Option<bool> {
        let b = self.velocity_sum_bound?;
        Some(
            self.velocity_sums
                .iter()
                .all(|m| m.mean() <= b + 3.0 * m.std_error()),
        )
    }

    pub fn distances_within_bound(&self) -> bool {
        self.checkpoints
            .iter()
            .all(|c| c.abs_distance.mean() <= c.bound)
    }
}

struct TwoParticleTrial {
    entered: bool,
    min_x: f64,
    vsum: [f64; 2],
    d: Vec<f64>,
    frozen: bool,
}

pub fn stagnation_demo_two_particles(cfg: &TwoParticleDemoConfig) -> Result<TwoParticleDemoReport> {
    cfg.params.validate()?;
    if cfg.params.m != 2 || cfg.params.n != 1 {
        return Err(Error::param(
            "m",
            "the two-particle demo needs m = 2, n = 1",
        ));
    }
    if cfg.trials == 0 {
        return Err(Error::param("trials", "at least one trial is required"));
    }
    let radius = cfg.params.epsilon;
    let init = cfg.init;
    let mut checkpoints = cfg.checkpoints.clone();
    checkpoints.sort_unstable();
    checkpoints.dedup();

    let results: Vec<TwoParticleTrial> = (0..cfg.trials as usize)
        .into_par_iter()
        .map(|k| {
            let rng = RngStream::new(cfg.master_seed, k as u64);
            let mut s =
                SwarmState::from_explicit(&[init.x1, init.x2], &[init.v1, init.v2], 2, 1, &Sphere)
                    .expect("shape fixed at m = 2");
            let mut out = TwoParticleTrial {
                entered: init.x1.abs() <= radius || init.x2.abs() <= radius,
                min_x: init.x1.min(init.x2),
                vsum: [0.0; 2],
                d: Vec::with_capacity(checkpoints.len()),
                frozen: false,
            };
            let mut next_cp = 0;
            let mut record_d =
                |t: u64, s: &SwarmState<f64>, out: &mut TwoParticleTrial, upto: bool| {
                    while next_cp < checkpoints.len()
                        && (checkpoints[next_cp] == t || (upto && checkpoints[next_cp] > t))
                    {
                        out.d.push((s.positions()[1] - s.positions()[0]).abs());
                        next_cp += 1;
                    }
                };
            record_d(0, &s, &mut out, false);
            for t in 1..=cfg.steps {
                if s.is_frozen(&cfg.params) {
                    out.frozen = true;
                    record_d(t, &s, &mut out, true);
                    break;
                }
                s.step(&cfg.params, &Sphere, &rng);
                let (x, v) = (s.positions(), s.velocities());
                out.vsum[0] += v[0].abs();
                out.vsum[1] += v[1].abs();
                out.min_x = out.min_x.min(x[0]).min(x[1]);
                if x[0].abs() <= radius || x[1].abs() <= radius {
                    out.entered = true;
                }
                record_d(t, &s, &mut out, false);
            }
            out
        })
        .collect();

    let mut velocity_sums = [RunningMoments::new(), RunningMoments::new()];
    let mut d_moments = vec![RunningMoments::new(); checkpoints.len()];
    let (mut entered, mut frozen, mut min_position) = (0, 0, f64::INFINITY);
    for r in &results {
        entered += r.entered as u64;
        frozen += r.frozen as u64;
        min_position = min_position.min(r.min_x);
        velocity_sums[0].push(r.vsum[0]);
        velocity_sums[1].push(r.vsum[1]);
        for (m, &d) in d_moments.iter_mut().zip(&r.d) {
            m.push(d);
        }
    }
    let verdict = check_two_particle_stagnation(&cfg.params, &init);
    let kappa = verdict.kappa;
    Ok(TwoParticleDemoReport {
        trials: cfg.trials,
        steps: cfg.steps,
        entered,
        min_position,
        velocity_sums,
        velocity_sum_bound: velocity_sum_bound(&cfg.params, &init).ok(),
        checkpoints: checkpoints
            .iter()
            .zip(d_moments)
            .map(|(&t, m)| DistanceCheckpoint {
                t,
                abs_distance: m,
                bound: d_abs_expectation_bound(t as u32, &init, kappa),
                bound_abs: d_abs_expectation_bound_abs(t as u32, &init, kappa),
            })
            .collect(),
        frozen,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bad_init(trials: u64, budget: u64) -> BadInitConfig {
        BadInitConfig {
            omega: 0.95,
            phi: 1.5,
            x0: 0.9,
            v0: -0.01,
            epsilon: 0.5,
            alpha: 1.0,
            compare_steps: 2_000,
            trials,
            budget,
            master_seed: 17,
        }
    }

    #[test]
    fn bad_init_matches_closed_form_and_stays_out() {
        let r = bad_init_demo(&bad_init(5, 100_000)).unwrap();
        assert!(r.event_as_printed && r.event_sufficient);
        assert!(r.max_rel_error_x < 1e-12, "{}", r.max_rel_error_x);
        assert!(r.max_rel_error_v < 1e-12, "{}", r.max_rel_error_v);
        assert!(r.min_position > r.radius);
        assert!((r.limit - 0.71).abs() < 1e-12);
        assert!(r.all_censored());
        assert_eq!(r.fht.censored, 5);
    }

    #[test]
    fn printed_event_with_large_inertia_can_hit() {
        let mut c = bad_init(1, 10_000);
        c.omega = 0.7;
        c.v0 = -0.3;
        let r = bad_init_demo(&c).unwrap();
        assert!(r.event_as_printed && !r.event_sufficient);
        assert_eq!(r.fht.hits, 1);
    }

    fn two_particle(trials: u64, steps: u64) -> TwoParticleDemoConfig {
        TwoParticleDemoConfig {
            params: PsoParams::new(0.07, 0.0, 1.5, 0.0, 1.0, 0.5, 2, 1).unwrap(),
            init: TwoParticleInit::new(184.0, 185.0, -1.0, -1.0),
            trials,
            steps,
            checkpoints: vec![10, 50, 200],
            master_seed: 23,
        }
    }

    #[test]
    fn two_particle_example_stagnates() {
        let r = stagnation_demo_two_particles(&two_particle(200, 20_000)).unwrap();
        assert_eq!(r.entered, 0);
        assert!(r.min_position > 100.0);
        assert_eq!(r.velocity_sums_within_bound(), Some(true));
        assert!(r.distances_within_bound());
        assert_eq!(r.checkpoints.len(), 3);
        assert!(r.checkpoints.iter().all(|c| c.abs_distance.count() == 200));
        assert!(!r.verdict.all_met());
    }

    #[test]
    fn two_particle_demo_is_reproducible() {
        let a = stagnation_demo_two_particles(&two_particle(20, 500)).unwrap();
        let b = stagnation_demo_two_particles(&two_particle(20, 500)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn two_particle_rejects_wrong_swarm() {
        let mut c = two_particle(1, 10);
        c.params.m = 3;
        assert!(stagnation_demo_two_particles(&c).is_err());
    }
}
