//! Checks on the one-dimensional recurrence with frozen `P` and `G`:
//! stationary moments and the improvement-probability constants.

use num_rational::Ratio;
use rayon::prelude::*;

use super::stats::{binomial_sigma, RunningMoments};
use crate::error::{Error, Result};
use crate::moments::{
    equilibrium_point, f_one_raw, variance_limit, variance_limit_printed, MomentTransition,
};
use crate::params::PsoParams;
use crate::regions::cell_centres;
use crate::rng::{Purpose, RngStream};

/// One particle with fixed attractors: `V' = ωV + φ1R(P−X) + φ2S(G−X) + Δ`.
#[derive(Debug, Clone, Copy)]
struct FixedAttractorWalk<'a> {
    params: &'a PsoParams<f64>,
    p: f64,
    g: f64,
    rng: RngStream,
    x: f64,
    v: f64,
    t: u64,
    /// Noise added in the last step.
    last_noise: f64,
}

impl<'a> FixedAttractorWalk<'a> {
    fn new(params: &'a PsoParams<f64>, p: f64, g: f64, rng: RngStream) -> Self {
        let a = params.alpha;
        let x = rng.uniform_in(-a, a, 0, 0, 0, Purpose::InitX);
        let v = rng.uniform_in(-a, a, 0, 0, 0, Purpose::InitV);
        Self {
            params,
            p,
            g,
            rng,
            x,
            v,
            t: 0,
            last_noise: 0.0,
        }
    }

    fn step(&mut self) {
        let pr = self.params;
        let r = self.rng.uniform(0, 0, self.t, Purpose::R);
        let s = self.rng.uniform(0, 0, self.t, Purpose::S);
        let mut v =
            pr.omega * self.v + pr.phi1 * r * (self.p - self.x) + pr.phi2 * s * (self.g - self.x);
        self.last_noise = if pr.delta > 0.0 {
            let h = 0.5 * pr.delta;
            self.rng.uniform_in(-h, h, 0, 0, self.t, Purpose::Delta)
        } else {
            0.0
        };
        v += self.last_noise;
        self.v = v;
        self.x += v;
        self.t += 1;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryConfig {
    pub params: PsoParams<f64>,
    pub p: f64,
    pub g: f64,
    pub trials: u64,
    /// First sampling time. No mixing rate is known, so two windows
    /// (`burn_in` and `horizon`) are compared.
    pub burn_in: u64,
    pub horizon: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryReport {
    pub f1: f64,
    pub mean_limit: f64,
    /// Fixed point of the exact moment recurrence.
    pub oracle_mean: f64,
    pub oracle_variance: f64,
    pub closed_form_variance: f64,
    /// `δ²/(12 f(1))`-style printing (noise term without `(1+ω)`).
    pub printed_variance: f64,
    /// Cross-trial moments of `X` at `burn_in` and at `horizon`.
    pub early: RunningMoments,
    pub late: RunningMoments,
}

impl StationaryReport {
    pub fn oracle_closed_form_rel_gap(&self) -> f64 {
        rel_gap(self.closed_form_variance, self.oracle_variance)
    }

    pub fn late_variance_rel_error(&self, target: f64) -> f64 {
        rel_gap(self.late.variance(), target)
    }

    /// Late mean within `k` standard errors of the limit.
    pub fn mean_within(&self, k: f64) -> bool {
        (self.late.mean() - self.mean_limit).abs() <= k * self.late.std_error()
    }

    /// Late variance within `k` of its (approximate) standard errors of the oracle.
    pub fn variance_within(&self, k: f64) -> bool {
        (self.late.variance() - self.oracle_variance).abs() <= k * self.late.variance_std_error()
    }
}

fn rel_gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

pub fn stationary_moment_check(cfg: &StationaryConfig) -> Result<StationaryReport> {
    cfg.params.validate()?;
    if cfg.trials < 2 {
        return Err(Error::param(
            "trials",
            "need at least two trials for a variance",
        ));
    }
    if cfg.horizon < cfg.burn_in {
        return Err(Error::param("horizon", "must not precede burn_in"));
    }
    let closed_form_variance = variance_limit(&cfg.params, cfg.p, cfg.g)?;
    let printed_variance = variance_limit_printed(&cfg.params, cfg.p, cfg.g)?;
    let oracle = MomentTransition::new(&cfg.params, cfg.p, cfg.g).fixed_point()?;

    let samples: Vec<(f64, f64)> = (0..cfg.trials as usize)
        .into_par_iter()
        .map(|k| {
            let mut w = FixedAttractorWalk::new(
                &cfg.params,
                cfg.p,
                cfg.g,
                RngStream::new(cfg.master_seed, k as u64),
            );
            while w.t < cfg.burn_in {
                w.step();
            }
            let early = w.x;
            while w.t < cfg.horizon {
                w.step();
            }
            (early, w.x)
        })
        .collect();
    let early = samples.iter().map(|s| s.0).collect();
    let late = samples.iter().map(|s| s.1).collect();
    Ok(StationaryReport {
        f1: f_one_raw(cfg.params.omega, cfg.params.phi1, cfg.params.phi2),
        mean_limit: equilibrium_point(&cfg.params, cfg.p, cfg.g)?,
        oracle_mean: oracle.mean(),
        oracle_variance: oracle.variance(),
        closed_form_variance,
        printed_variance,
        early,
        late,
    })
}

/// `Pr(Δ < −cδ)` for `Δ ~ U[−δ/2, δ/2]` and `0 ≤ c ≤ 1/2`, exactly.
pub fn delta_tail_probability(c: Ratio<i64>) -> Result<Ratio<i64>> {
    let half = Ratio::new(1, 2);
    if c < Ratio::from_integer(0) || c > half {
        return Err(Error::param("c", "must lie in [0, 1/2]"));
    }
    Ok(half - c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementConfig {
    /// Noisy PSO parameters with `f(1) > 1/3`.
    pub params: PsoParams<f64>,
    /// Common value of `P` and `G`.
    pub g: f64,
    pub trials: u64,
    pub burn_in: u64,
    pub samples_per_trial: u64,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImprovementReport {
    /// Exact `Pr(Δ < −0.4999δ)`.
    pub delta_tail_exact: Ratio<i64>,
    pub delta_tail_empirical: f64,
    pub epsilon_prime: f64,
    pub samples: u64,
    /// Frequency of `|Y_t − G| ≥ 0.4899δ + ε′`.
    pub chebyshev_frequency: f64,
    pub chebyshev_bound: f64,
    /// Frequency of `G − δ ≤ X_t ≤ G − δ/100 + ε′`.
    pub compound_frequency: f64,
    pub compound_bound: f64,
    pub f1: f64,
}

impl ImprovementReport {
    pub fn chebyshev_holds(&self) -> bool {
        self.chebyshev_frequency
            <= self.chebyshev_bound + 3.0 * binomial_sigma(self.chebyshev_bound, self.samples)
    }

    pub fn compound_holds(&self) -> bool {
        self.compound_frequency
            >= self.compound_bound - 3.0 * binomial_sigma(self.compound_bound, self.samples)
    }
}

pub fn improvement_probability_check(cfg: &ImprovementConfig) -> Result<ImprovementReport> {
    cfg.params.validate()?;
    let delta = cfg.params.delta;
    if delta <= 0.0 {
        return Err(Error::param("delta", "the improvement check needs noise"));
    }
    let f1 = f_one_raw(cfg.params.omega, cfg.params.phi1, cfg.params.phi2);
    if f1 <= 1.0 / 3.0 {
        return Err(Error::Precondition(format!("f(1) = {f1} must exceed 1/3")));
    }
    let eps_prime = delta / 1000.0;
    let tail_c = 0.4999 * delta;
    let cheb_radius = 0.4899 * delta + eps_prime;
    let (lo, hi) = (cfg.g - delta, cfg.g - delta / 100.0 + eps_prime);

    let counts: Vec<[u64; 3]> = (0..cfg.trials as usize)
        .into_par_iter()
        .map(|k| {
            let rng = RngStream::new(cfg.master_seed, k as u64);
            let mut w = FixedAttractorWalk::new(&cfg.params, cfg.g, cfg.g, rng);
            while w.t < cfg.burn_in {
                w.step();
            }
            let mut c = [0u64; 3];
            for _ in 0..cfg.samples_per_trial {
                w.step();
                let y = w.x - w.last_noise;
                c[0] += (w.last_noise < -tail_c) as u64;
                c[1] += ((y - cfg.g).abs() >= cheb_radius) as u64;
                c[2] += (lo <= w.x && w.x <= hi) as u64;
            }
            c
        })
        .collect();
    let mut total = [0u64; 3];
    for c in &counts {
        for (t, v) in total.iter_mut().zip(c) {
            *t += v;
        }
    }
    let samples = cfg.trials * cfg.samples_per_trial;
    let n = samples as f64;
    Ok(ImprovementReport {
        delta_tail_exact: delta_tail_probability(Ratio::new(4999, 10000))?,
        delta_tail_empirical: total[0] as f64 / n,
        epsilon_prime: eps_prime,
        samples,
        chebyshev_frequency: total[1] as f64 / n,
        chebyshev_bound: 25.0 / 36.0,
        compound_frequency: total[2] as f64 / n,
        compound_bound: 3.0 / 100_000.0,
        f1,
    })
}

/// Stationary `Var(Y)/δ²` with `Y = X − Δ` on the `(ω, φ1 = φ2 = φ)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaYGridReport {
    /// Cells with `0 ≤ ω < 1` and `f(1) > 1/3`.
    pub cells_checked: u64,
    /// Cells where the exact stationary `Var(Y)` exceeds `δ²/6`.
    pub oracle_violations: u64,
    /// Cells where `δ²(1 − f(1))/(12 f(1))` exceeds `δ²/6`.
    pub formula_violations: u64,
    /// Largest oracle `σ_Y²/δ²` and where it occurs.
    pub worst: Option<(f64, f64, f64)>,
}

/// Checks `σ_Y² ≤ δ²/6` cell by cell. The oracle value is the fixed point of
/// the moment recurrence (with `δ = 1`, `P = G = 0`) minus `Var(Δ) = 1/12`.
pub fn sigma_y_grid_check(
    omega_range: (f64, f64),
    phi_range: (f64, f64),
    resolution: usize,
) -> Result<SigmaYGridReport> {
    let omegas = cell_centres(omega_range.0, omega_range.1, resolution);
    let phis = cell_centres(phi_range.0, phi_range.1, resolution);
    let cells: Vec<Option<(f64, f64, f64, bool)>> = omegas
        .par_iter()
        .flat_map_iter(|&omega| {
            phis.iter().map(move |&phi| {
                let f1 = f_one_raw(omega, phi, phi);
                if !(0.0..1.0).contains(&omega) || f1 <= 1.0 / 3.0 {
                    return Ok(None);
                }
                let params = PsoParams::new(omega, phi, phi, 1.0, 1.0, 1.0, 1, 1)?;
                let var_x = MomentTransition::new(&params, 0.0, 0.0)
                    .fixed_point()?
                    .variance();
                let sigma_y2 = var_x - 1.0 / 12.0;
                let formula = (1.0 - f1) / (12.0 * f1);
                Ok(Some((omega, phi, sigma_y2, formula > 1.0 / 6.0)))
            })
        })
        .collect::<Result<_>>()?;
    let mut report = SigmaYGridReport {
        cells_checked: 0,
        oracle_violations: 0,
        formula_violations: 0,
        worst: None,
    };
    for (omega, phi, s2, formula_bad) in cells.into_iter().flatten() {
        report.cells_checked += 1;
        report.oracle_violations += (s2 > 1.0 / 6.0) as u64;
        report.formula_violations += formula_bad as u64;
        if report.worst.is_none_or(|w| s2 > w.2) {
            report.worst = Some((omega, phi, s2));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(delta: f64) -> PsoParams<f64> {
        PsoParams::new(0.4, 1.5, 1.5, delta, 1.0, 0.01, 1, 1).unwrap()
    }

    #[test]
    fn exact_tail_is_one_in_ten_thousand() {
        assert_eq!(
            delta_tail_probability(Ratio::new(4999, 10000)).unwrap(),
            Ratio::new(1, 10000)
        );
        assert_eq!(
            delta_tail_probability(Ratio::new(1, 2)).unwrap(),
            Ratio::from_integer(0)
        );
        assert!(delta_tail_probability(Ratio::new(3, 4)).is_err());
    }

    #[test]
    fn noise_only_variance_matches_oracle() {
        let r = stationary_moment_check(&StationaryConfig {
            params: params(0.1),
            p: 0.0,
            g: 0.0,
            trials: 20_000,
            burn_in: 300,
            horizon: 600,
            master_seed: 3,
        })
        .unwrap();
        assert_relative_eq!(
            r.oracle_variance,
            0.0018087855297157628,
            max_relative = 1e-9
        );
        assert!(r.oracle_closed_form_rel_gap() < 1e-9);
        assert!(r.mean_within(4.0));
        assert!(r.late_variance_rel_error(r.oracle_variance) < 0.05);
        assert!(r.late_variance_rel_error(r.printed_variance) > 0.2);
    }

    #[test]
    fn equal_attractors_without_noise_collapse() {
        let r = stationary_moment_check(&StationaryConfig {
            params: params(0.0),
            p: 2.5,
            g: 2.5,
            trials: 50,
            burn_in: 500,
            horizon: 1000,
            master_seed: 1,
        })
        .unwrap();
        assert!((r.late.mean() - 2.5).abs() < 1e-9);
        assert!(r.late.variance() < 1e-18);
        assert!(r.oracle_variance.abs() < 1e-12);
    }

    #[test]
    fn improvement_check_small_run() {
        let r = improvement_probability_check(&ImprovementConfig {
            params: params(0.01),
            g: 1.0,
            trials: 8,
            burn_in: 200,
            samples_per_trial: 20_000,
            master_seed: 7,
        })
        .unwrap();
        assert_eq!(r.delta_tail_exact, Ratio::new(1, 10000));
        assert!(r.chebyshev_holds());
        assert!(r.compound_holds());
        assert_eq!(r.samples, 160_000);
        assert_relative_eq!(r.epsilon_prime, 1e-5);
    }

    #[test]
    fn improvement_check_preconditions() {
        let mut c = ImprovementConfig {
            params: params(0.0),
            g: 1.0,
            trials: 1,
            burn_in: 1,
            samples_per_trial: 1,
            master_seed: 7,
        };
        assert!(improvement_probability_check(&c).is_err());
        c.params = PsoParams::new(0.9, 1.0, 1.0, 0.01, 1.0, 0.01, 1, 1).unwrap();
        assert!(f_one_raw(0.9, 1.0, 1.0) < 1.0 / 3.0);
        assert!(improvement_probability_check(&c).is_err());
    }

    #[test]
    fn sigma_y_grid_small() {
        let r = sigma_y_grid_check((0.0, 1.0), (0.0, 4.0), 40).unwrap();
        assert!(r.cells_checked > 0);
        assert_eq!(r.formula_violations, 0);
        // the exact variance exceeds δ²/6 where 1/3 < f(1) < (1+ω)/3
        assert!(r.oracle_violations > 0);
    }
}
