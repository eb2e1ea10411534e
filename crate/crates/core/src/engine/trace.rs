use std::fmt::Write as _;

use super::SwarmState;
use crate::scalar::Scalar;

pub const TRAJECTORY_HEADER: &str = "t,particle,dim,x,v,p,g,f_g";

/// One row of the trajectory dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow<T> {
    pub t: u64,
    pub particle: usize,
    pub dim: usize,
    pub x: T,
    pub v: T,
    pub p: T,
    pub g: T,
    pub f_g: T,
}

/// Samples every `sample_every`-th step (step 0 included).
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    sample_every: u64,
    rows: Vec<TraceRow<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn new(sample_every: u64) -> Self {
        Self {
            sample_every: sample_every.max(1),
            rows: Vec::new(),
        }
    }

    pub fn record(&mut self, state: &SwarmState<T>) {
        let t = state.step_count();
        if !t.is_multiple_of(self.sample_every) {
            return;
        }
        let n = state.dim();
        let g = state.global_best();
        for i in 0..state.swarm_size() {
            let (x, v, p) = (state.position(i), state.velocity(i), state.personal_best(i));
            for j in 0..n {
                self.rows.push(TraceRow {
                    t,
                    particle: i,
                    dim: j,
                    x: x[j],
                    v: v[j],
                    p: p[j],
                    g: g[j],
                    f_g: state.global_best_value(),
                });
            }
        }
    }

    pub fn rows(&self) -> &[TraceRow<T>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<TraceRow<T>> {
        self.rows
    }
}

/// Renders rows as CSV. Reals use the shortest round-trip representation,
/// so equal trajectories give byte-identical output.
pub fn write_trajectory_csv<T: Scalar>(rows: &[TraceRow<T>]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t, r.particle, r.dim, r.x, r.v, r.p, r.g, r.f_g
        );
    }
    out
}
