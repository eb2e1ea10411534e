//! Synchronous Basic / Noisy PSO with first-hitting-time tracking.
//!
//! One step updates every particle against the global best from the start
//! of the step, then refreshes personal bests from the new positions and
//! finally recomputes the global best from the refreshed personal bests.
//! Ties never displace an incumbent: a personal best moves only on strict
//! improvement and the global best is the lowest-index minimiser.

mod trace;

pub use trace::{write_trajectory_csv, TraceRow, Trajectory, TRAJECTORY_HEADER};

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::params::PsoParams;
use crate::rng::{Purpose, RngStream};
use crate::scalar::Scalar;

/// Positions, velocities and bests of the whole swarm, stored row-major
/// (`particle * n + dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmState<T> {
    m: usize,
    n: usize,
    x: Vec<T>,
    v: Vec<T>,
    p: Vec<T>,
    p_val: Vec<T>,
    g: Vec<T>,
    g_val: T,
    g_index: usize,
    t: u64,
    evals: u64,
    improvements: Vec<u64>,
    first_hit: Option<u64>,
}

/// Result of a single trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Evaluation count at the end of the step whose sample entered the ball.
    Hit { evals: u64 },
    /// Budget exhausted without a hit.
    Censored { budget: u64 },
}

impl Outcome {
    pub fn is_hit(&self) -> bool {
        matches!(self, Outcome::Hit { .. })
    }

    pub fn evals(&self) -> u64 {
        match *self {
            Outcome::Hit { evals } => evals,
            Outcome::Censored { budget } => budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult<T> {
    pub outcome: Outcome,
    pub final_g_value: T,
    pub trace: Option<Vec<TraceRow<T>>>,
}

impl<T: Scalar> SwarmState<T> {
    /// Uniform initialisation on `[-alpha, alpha]` (positions and velocities).
    pub fn init<O: Objective<T>>(params: &PsoParams<T>, f: &O, rng: &RngStream) -> Self {
        Self::init_attempt(params, f, rng, 0)
    }

    /// Like [`SwarmState::init`] but draws from the `attempt`-th initialisation
    /// slot, so rejection sampling never reuses a rejected swarm's draws.
    pub fn init_attempt<O: Objective<T>>(
        params: &PsoParams<T>,
        f: &O,
        rng: &RngStream,
        attempt: u64,
    ) -> Self {
        let (m, n) = (params.m, params.n);
        let alpha = params.alpha.to_f64_lossy();
        let mut x = Vec::with_capacity(m * n);
        let mut v = Vec::with_capacity(m * n);
        for i in 0..m as u64 {
            for j in 0..n as u64 {
                x.push(T::lit(rng.uniform_in(
                    -alpha,
                    alpha,
                    i,
                    j,
                    attempt,
                    Purpose::InitX,
                )));
                v.push(T::lit(rng.uniform_in(
                    -alpha,
                    alpha,
                    i,
                    j,
                    attempt,
                    Purpose::InitV,
                )));
            }
        }
        let mut state = Self::assemble(m, n, x, v, f);
        state.mark_initial_hits(params, f);
        state
    }

    /// Caller-specified positions and velocities (flattened `m * n`, row-major).
    /// Personal bests start at the positions. Hit tracking starts with the
    /// first call that receives parameters ([`SwarmState::mark_initial_hits`]
    /// or any step).
    pub fn from_explicit<O: Objective<T>>(
        positions: &[T],
        velocities: &[T],
        m: usize,
        n: usize,
        f: &O,
    ) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Precondition("swarm must be non-empty".into()));
        }
        if positions.len() != m * n {
            return Err(Error::ShapeMismatch {
                expected: m * n,
                actual: positions.len(),
            });
        }
        if velocities.len() != m * n {
            return Err(Error::ShapeMismatch {
                expected: m * n,
                actual: velocities.len(),
            });
        }
        Ok(Self::assemble(
            m,
            n,
            positions.to_vec(),
            velocities.to_vec(),
            f,
        ))
    }

    fn assemble<O: Objective<T>>(m: usize, n: usize, x: Vec<T>, v: Vec<T>, f: &O) -> Self {
        let p = x.clone();
        let p_val: Vec<T> = p.chunks_exact(n).map(|pi| f.evaluate(pi)).collect();
        let g_index = argmin(&p_val);
        let mut state = Self {
            m,
            n,
            x,
            v,
            p,
            g: vec![T::zero(); n],
            g_val: p_val[g_index],
            p_val,
            g_index,
            t: 0,
            evals: m as u64,
            improvements: vec![0; m],
            first_hit: None,
        };
        state.refresh_global();
        state
    }

    /// Records a hit at initialisation if any initial sample is inside the ball.
    pub fn mark_initial_hits<O: Objective<T>>(&mut self, params: &PsoParams<T>, f: &O) {
        if self.t == 0 {
            let vals = self.p_val.clone();
            self.check_hit(params, f, &vals);
        }
    }

    fn check_hit<O: Objective<T>>(&mut self, params: &PsoParams<T>, f: &O, values: &[T]) {
        if self.first_hit.is_some() {
            return;
        }
        let opt = f.optimum_value();
        if values.iter().any(|&fv| (fv - opt).abs() < params.epsilon) {
            self.first_hit = Some(self.evals);
        }
    }

    fn refresh_global(&mut self) {
        let k = argmin(&self.p_val);
        self.g_index = k;
        self.g_val = self.p_val[k];
        let n = self.n;
        self.g.copy_from_slice(&self.p[k * n..(k + 1) * n]);
    }

    /// One synchronous update of all particles.
    pub fn step<O: Objective<T>>(&mut self, params: &PsoParams<T>, f: &O, rng: &RngStream) {
        let n = self.n;
        let (omega, phi1, phi2) = (params.omega, params.phi1, params.phi2);
        let noisy = params.is_noisy();
        let half = params.delta.to_f64_lossy() * 0.5;
        let t = self.t;
        let opt = f.optimum_value();
        let mut hit = false;
        for i in 0..self.m {
            let row = i * n;
            for j in 0..n {
                let k = row + j;
                let (ii, jj) = (i as u64, j as u64);
                let r = T::lit(rng.uniform(ii, jj, t, Purpose::R));
                let s = T::lit(rng.uniform(ii, jj, t, Purpose::S));
                let x = self.x[k];
                let mut v =
                    omega * self.v[k] + phi1 * r * (self.p[k] - x) + phi2 * s * (self.g[j] - x);
                if noisy {
                    v = v + T::lit(rng.uniform_in(-half, half, ii, jj, t, Purpose::Delta));
                }
                self.v[k] = v;
                self.x[k] = x + v;
            }
            let fx = f.evaluate(&self.x[row..row + n]);
            if (fx - opt).abs() < params.epsilon {
                hit = true;
            }
            if fx < self.p_val[i] {
                self.p_val[i] = fx;
                self.p[row..row + n].copy_from_slice(&self.x[row..row + n]);
                self.improvements[i] += 1;
            }
        }
        self.refresh_global();
        self.t += 1;
        self.evals += self.m as u64;
        if hit && self.first_hit.is_none() {
            self.first_hit = Some(self.evals);
        }
    }

    /// `true` when no further step can change positions, velocities or bests:
    /// no noise, all velocities zero and every particle sitting on the global best.
    pub fn is_frozen(&self, params: &PsoParams<T>) -> bool {
        if params.is_noisy() {
            return false;
        }
        let n = self.n;
        self.v.iter().all(|&v| v == T::zero())
            && self.x.iter().zip(&self.p).all(|(x, p)| x == p)
            && self
                .x
                .chunks_exact(n)
                .all(|xi| xi.iter().zip(&self.g).all(|(a, b)| a == b))
            && self.x.iter().all(|x| x.is_finite())
    }

    /// Steps until a hit or until another step would exceed `budget` evaluations.
    ///
    /// Frozen Basic-PSO states are fast-forwarded to the budget; the skipped
    /// steps would not change anything but the counters.
    pub fn run_until_hit<O: Objective<T>>(
        &mut self,
        params: &PsoParams<T>,
        f: &O,
        budget: u64,
        rng: &RngStream,
    ) -> TrialResult<T> {
        self.mark_initial_hits(params, f);
        let m = self.m as u64;
        while self.first_hit.is_none() && self.evals + m <= budget {
            if self.is_frozen(params) {
                let remaining = (budget - self.evals) / m;
                self.t += remaining;
                self.evals += remaining * m;
                break;
            }
            self.step(params, f, rng);
        }
        self.result(budget)
    }

    /// Like [`SwarmState::run_until_hit`] without fast-forwarding; `observe`
    /// sees the initial state and the state after every step.
    pub fn run_until_hit_observed<O, F>(
        &mut self,
        params: &PsoParams<T>,
        f: &O,
        budget: u64,
        rng: &RngStream,
        mut observe: F,
    ) -> TrialResult<T>
    where
        O: Objective<T>,
        F: FnMut(&Self),
    {
        self.mark_initial_hits(params, f);
        observe(self);
        let m = self.m as u64;
        while self.first_hit.is_none() && self.evals + m <= budget {
            self.step(params, f, rng);
            observe(self);
        }
        self.result(budget)
    }

    /// Runs with a trajectory recorder and attaches the sampled trace.
    pub fn run_until_hit_traced<O: Objective<T>>(
        &mut self,
        params: &PsoParams<T>,
        f: &O,
        budget: u64,
        rng: &RngStream,
        sample_every: u64,
    ) -> TrialResult<T> {
        let mut recorder = Trajectory::new(sample_every);
        let res = self.run_until_hit_observed(params, f, budget, rng, |s| recorder.record(s));
        TrialResult {
            trace: Some(recorder.into_rows()),
            ..res
        }
    }

    fn result(&self, budget: u64) -> TrialResult<T> {
        let outcome = match self.first_hit {
            Some(evals) => Outcome::Hit { evals },
            None => Outcome::Censored { budget },
        };
        TrialResult {
            outcome,
            final_g_value: self.g_val,
            trace: None,
        }
    }

    pub fn swarm_size(&self) -> usize {
        self.m
    }
    pub fn dim(&self) -> usize {
        self.n
    }
    pub fn positions(&self) -> &[T] {
        &self.x
    }
    pub fn velocities(&self) -> &[T] {
        &self.v
    }
    pub fn personal_bests(&self) -> &[T] {
        &self.p
    }
    pub fn personal_best_values(&self) -> &[T] {
        &self.p_val
    }
    pub fn position(&self, i: usize) -> &[T] {
        &self.x[i * self.n..(i + 1) * self.n]
    }
    pub fn velocity(&self, i: usize) -> &[T] {
        &self.v[i * self.n..(i + 1) * self.n]
    }
    pub fn personal_best(&self, i: usize) -> &[T] {
        &self.p[i * self.n..(i + 1) * self.n]
    }
    pub fn global_best(&self) -> &[T] {
        &self.g
    }
    pub fn global_best_value(&self) -> T {
        self.g_val
    }
    pub fn global_best_index(&self) -> usize {
        self.g_index
    }
    pub fn step_count(&self) -> u64 {
        self.t
    }
    pub fn eval_count(&self) -> u64 {
        self.evals
    }
    /// Number of strict personal-best improvements per particle since initialisation.
    pub fn improvements(&self) -> &[u64] {
        &self.improvements
    }
    pub fn first_hit(&self) -> Option<u64> {
        self.first_hit
    }
}

/// Lowest index among the minimal values. `NaN` never wins.
fn argmin<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
