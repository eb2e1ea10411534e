//! Subcommand bodies. Each returns the files to write; nothing here touches
//! the file system.

use swarmlab::engine::write_trajectory_csv;
use swarmlab::experiments::{
    bad_init_demo, counterexample_demo, estimate_fht, improvement_probability_check,
    pbest_null_sequence_check, sigma_y_grid_check, stagnation_demo_two_particles,
    stationary_moment_check, write_fht_csv, write_survival_csv, BadInitConfig,
    CounterexampleConfig, ExperimentConfig, ImprovementConfig, InitSpec, PbestConfig,
    StationaryConfig, TwoParticleDemoConfig,
};
use swarmlab::moments::{
    equilibrium_point, f_one, f_one_asymmetric, second_moment_radius, second_moment_radius_cubic,
    variance_limit, variance_limit_printed, MomentState, MomentTransition,
};
use swarmlab::regions::{render_regions_svg, scan_regions, write_regions_csv};
use swarmlab::{ObjectiveKind, PsoParams, TwoParticleInit};

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::report::Report;

/// Files produced by a command, in emission order.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    /// Printed to stdout after the files are written.
    pub summary: String,
}

impl Artifacts {
    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn add_report(&mut self, report: Report) {
        self.summary = report.as_str().to_string();
        self.add("report.txt", report.into_bytes());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DemoName {
    /// Particle 2 never improves; its variance stays proportional to (P−G)².
    Counterexample,
    /// Spread between personal and global bests on Sphere⁺.
    Pbest,
    /// Frequencies behind the improvement-probability constants.
    Improvement,
    /// Stationary Var(X − Δ) against δ²/6 over a parameter grid.
    SigmaY,
}

pub fn params(c: &Config) -> CliResult<PsoParams<f64>> {
    Ok(PsoParams::new(
        c.get("omega")?,
        c.get("phi1")?,
        c.get("phi2")?,
        c.get("delta")?,
        c.get("alpha")?,
        c.get("epsilon")?,
        c.get("m")?,
        c.get("n")?,
    )?)
}

fn objective(c: &Config) -> CliResult<ObjectiveKind> {
    c.raw("objective")
        .parse()
        .map_err(|e| CliError::config(format!("key `objective`: {e}")))
}

fn init_spec(c: &Config) -> CliResult<InitSpec<f64>> {
    match c.raw("init") {
        "random" => Ok(InitSpec::Random),
        "explicit" => Ok(InitSpec::Explicit {
            positions: c.get_list("init_positions")?,
            velocities: c.get_list("init_velocities")?,
        }),
        other => Err(CliError::config(format!(
            "key `init`: expected `random` or `explicit`, got `{other}`"
        ))),
    }
}

fn experiment(c: &Config, seed: u64) -> CliResult<ExperimentConfig<f64>> {
    let cfg = ExperimentConfig {
        params: params(c)?,
        objective: objective(c)?,
        init: init_spec(c)?,
        trials: c.get("trials")?,
        budget: c.get("budget")?,
        master_seed: seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn positive(c: &Config, key: &str) -> CliResult<u64> {
    let v: u64 = c.get(key)?;
    if v == 0 {
        return Err(CliError::config(format!("key `{key}` must be positive")));
    }
    Ok(v)
}

fn opt_f64(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn simulate(c: &Config, seed: u64) -> CliResult<Artifacts> {
    let cfg = experiment(c, seed)?;
    let trial: u64 = c.get("trial")?;
    let every = positive(c, "sample_every")?;
    let res = cfg.run_trial_traced(trial, every)?;
    let mut a = Artifacts::default();
    a.add(
        "trajectory.csv",
        write_trajectory_csv(res.trace.as_deref().unwrap_or(&[])),
    );
    let mut r = Report::new("single traced trial");
    r.kv("objective", cfg.objective)
        .kv("trial", trial)
        .kv(
            "outcome",
            if res.outcome.is_hit() {
                "hit"
            } else {
                "censored"
            },
        )
        .kv("evals", res.outcome.evals())
        .kv("final_g_value", res.final_g_value);
    a.add_report(r);
    Ok(a)
}

pub fn fht(c: &Config, seed: u64) -> CliResult<Artifacts> {
    let cfg = experiment(c, seed)?;
    let est = estimate_fht(&cfg)?;
    let mut a = Artifacts::default();
    a.add("fht.csv", write_fht_csv(&est.records));
    a.add("survival.csv", write_survival_csv(&est.survival_curve));
    let mut r = Report::new("first hitting time estimate");
    r.kv("objective", cfg.objective)
        .kv("trials", est.trials)
        .kv("hits", est.hits)
        .kv("censored", est.censored)
        .kv("mean_over_hits", opt_f64(est.mean_over_hits))
        .kv("median_over_hits", opt_f64(est.median_over_hits))
        .kv("hit_probability_wilson_lo", est.hit_probability_interval.0)
        .kv("hit_probability_wilson_hi", est.hit_probability_interval.1);
    if est.censored > 0 {
        r.note("censored trials are excluded from the mean and median");
    }
    a.add_report(r);
    Ok(a)
}

pub fn regions(c: &Config) -> CliResult<Artifacts> {
    let (w0, w1): (f64, f64) = (c.get("omega_min")?, c.get("omega_max")?);
    let (p0, p1): (f64, f64) = (c.get("phi_min")?, c.get("phi_max")?);
    for (lo, hi, name) in [(w0, w1, "omega"), (p0, p1, "phi")] {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CliError::config(format!(
                "{name} range [{lo}, {hi}] is empty or not finite"
            )));
        }
    }
    let resolution = positive(c, "resolution")? as usize;
    let grid = scan_regions((w0, w1), (p0, p1), resolution);
    let mut a = Artifacts::default();
    a.add("regions.csv", write_regions_csv(&grid));
    if c.get_bool("svg")? {
        a.add("regions.svg", render_regions_svg(&grid));
    }
    let count = |f: fn(&swarmlab::RegionVerdict<f64>) -> bool| {
        grid.cells.iter().filter(|c| f(&c.verdict)).count()
    };
    let mut r = Report::new("convergence regions on the diagonal phi1 = phi2 = phi");
    r.kv("cells", grid.cells.len())
        .kv("deterministic", count(|v| v.deterministic))
        .kv("lyapunov", count(|v| v.lyapunov))
        .kv("mean_square", count(|v| v.mean_square))
        .kv("noisy_fht", count(|v| v.noisy_fht))
        .kv("pbest_convergence", count(|v| v.pbest_convergence))
        .kv("nesting_violations", grid.nesting_violations().len())
        .kv("noisy_violations", grid.noisy_violations().len());
    a.add_report(r);
    Ok(a)
}

fn two_values(c: &Config, key: &str) -> CliResult<[f64; 2]> {
    let v: Vec<f64> = c.get_list(key)?;
    <[f64; 2]>::try_from(v.as_slice())
        .map_err(|_| CliError::config(format!("key `{key}` needs exactly two values")))
}

fn one_value(c: &Config, key: &str) -> CliResult<f64> {
    let v: Vec<f64> = c.get_list(key)?;
    match v.as_slice() {
        [x] => Ok(*x),
        _ => Err(CliError::config(format!(
            "key `{key}` needs exactly one value"
        ))),
    }
}

pub fn stagnate(c: &Config, seed: u64) -> CliResult<Artifacts> {
    match c.raw("mode") {
        "two-particle" => stagnate_two_particles(c, seed),
        "bad-init" => stagnate_bad_init(c, seed),
        other => Err(CliError::config(format!(
            "key `mode`: expected `two-particle` or `bad-init`, got `{other}`"
        ))),
    }
}

fn stagnate_two_particles(c: &Config, seed: u64) -> CliResult<Artifacts> {
    let [x1, x2] = two_values(c, "init_positions")?;
    let [v1, v2] = two_values(c, "init_velocities")?;
    let base = params(c)?;
    if base.m != 2 || base.n != 1 {
        return Err(CliError::config("two-particle mode needs m = 2 and n = 1"));
    }
    let cfg = TwoParticleDemoConfig {
        params: PsoParams {
            epsilon: c.get("ball_radius")?,
            ..base
        },
        init: TwoParticleInit::new(x1, x2, v1, v2),
        trials: positive(c, "trials")?,
        steps: c.get("steps")?,
        checkpoints: c.get_list("checkpoints")?,
        master_seed: seed,
    };
    let rep = stagnation_demo_two_particles(&cfg)?;
    let v = &rep.verdict;
    let mut r = Report::new("two-particle stagnation");
    r.kv("kappa", v.kappa)
        .kv("lambda", v.lambda)
        .kv("velocity_coefficient", v.velocity_coefficient)
        .kv("position_threshold", v.position_threshold);
    for (name, ok) in &v.conditions {
        r.kv(&format!("condition.{name}"), ok);
    }
    r.kv("conditions_met", v.all_met());
    if !v.conditions["positions_above_threshold"]
        && v.conditions.iter().filter(|(_, ok)| !**ok).count() == 1
    {
        r.note(&format!(
            "the initial positions do not exceed the position threshold {:.1}; every other hypothesis holds, \
             so the guarantee is not certified for this configuration (velocity coefficient {:.1})",
            v.position_threshold, v.velocity_coefficient
        ));
    }
    r.kv("trials", rep.trials)
        .kv("steps", rep.steps)
        .kv("entered_ball", rep.entered)
        .kv("frozen_trials", rep.frozen)
        .kv("min_position", rep.min_position)
        .opt("velocity_sum_bound", rep.velocity_sum_bound);
    for (i, m) in rep.velocity_sums.iter().enumerate() {
        r.kv(&format!("velocity_sum_mean.{}", i + 1), m.mean())
            .kv(&format!("velocity_sum_se.{}", i + 1), m.std_error());
    }
    r.opt(
        "velocity_sums_within_bound",
        rep.velocity_sums_within_bound(),
    )
    .kv("distances_within_bound", rep.distances_within_bound());
    let mut csv = String::from("t,mean_abs_d,std_error,bound,bound_abs\n");
    for cp in &rep.checkpoints {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            cp.t,
            cp.abs_distance.mean(),
            cp.abs_distance.std_error(),
            cp.bound,
            cp.bound_abs
        ));
    }
    let mut a = Artifacts::default();
    a.add("distance.csv", csv);
    a.add_report(r);
    Ok(a)
}

fn stagnate_bad_init(c: &Config, seed: u64) -> CliResult<Artifacts> {
    let base = params(c)?;
    if base.m != 1 || base.n != 1 {
        return Err(CliError::config("bad-init mode needs m = 1 and n = 1"));
    }
    let cfg = BadInitConfig {
        omega: base.omega,
        phi: base.phi1,
        x0: one_value(c, "init_positions")?,
        v0: one_value(c, "init_velocities")?,
        epsilon: c.get("ball_radius")?,
        alpha: base.alpha,
        compare_steps: c.get("compare_steps")?,
        trials: positive(c, "trials")?,
        budget: c.get("budget")?,
        master_seed: seed,
    };
    let rep = bad_init_demo(&cfg)?;
    let mut r = Report::new("single particle after a bad initialisation");
    r.kv("event_as_printed", rep.event_as_printed)
        .kv("event_sufficient", rep.event_sufficient)
        .kv("limit", rep.limit)
        .kv("radius", rep.radius)
        .kv("compare_steps", cfg.compare_steps)
        .kv("max_rel_error_x", rep.max_rel_error_x)
        .kv("max_rel_error_v", rep.max_rel_error_v)
        .kv("min_position", rep.min_position)
        .kv("trials", rep.fht.trials)
        .kv("hits", rep.fht.hits)
        .kv("censored", rep.fht.censored);
    if rep.event_as_printed && !rep.event_sufficient {
        r.note("the start satisfies the bad-initialisation inequalities but the limit point lies inside the ball");
    }
    let mut a = Artifacts::default();
    a.add("fht.csv", write_fht_csv(&rep.fht.records));
    a.add_report(r);
    Ok(a)
}

pub fn moments(c: &Config, seed: Option<u64>) -> CliResult<Artifacts> {
    let params = params(c)?;
    let (p, g): (f64, f64) = (c.get("p")?, c.get("g")?);
    let transition = MomentTransition::new(&params, p, g);
    let steps: usize = c.get("moment_steps")?;
    let x0: f64 = c.get("x_start")?;
    let mut csv = String::from("t,mean,variance,second_moment\n");
    for (t, s) in transition
        .iterate(MomentState::deterministic(x0, x0), steps)
        .iter()
        .enumerate()
    {
        csv.push_str(&format!(
            "{t},{},{},{}\n",
            s.mean(),
            s.variance(),
            s.second_moment()
        ));
    }
    let mut r = Report::new("moment limits: closed form against the exact recurrence");
    r.kv("omega", params.omega)
        .kv("phi1", params.phi1)
        .kv("phi2", params.phi2)
        .kv("delta", params.delta)
        .kv("p", p)
        .kv("g", g)
        .kv("f1", f_one(&params))
        .kv(
            "f1_asymmetric_printing",
            f_one_asymmetric(params.omega, params.phi1, params.phi2),
        )
        .kv(
            "spectral_radius_power",
            opt_f64(second_moment_radius(&params).ok()),
        )
        .kv(
            "spectral_radius_cubic",
            opt_f64(second_moment_radius_cubic(&params).ok()),
        )
        .kv(
            "equilibrium",
            opt_f64(equilibrium_point(&params, p, g).ok()),
        );
    match (variance_limit(&params, p, g), transition.fixed_point()) {
        (Ok(closed), Ok(fp)) => {
            let gap = if closed == fp.variance() {
                0.0
            } else {
                (closed - fp.variance()).abs() / fp.variance().abs().max(f64::MIN_POSITIVE)
            };
            r.kv("ms_stable", true)
                .kv("variance_closed_form", closed)
                .kv(
                    "variance_printed_noise_term",
                    opt_f64(variance_limit_printed(&params, p, g).ok()),
                )
                .kv("oracle_mean", fp.mean())
                .kv("oracle_variance", fp.variance())
                .kv("closed_form_rel_gap", gap);
        }
        _ => {
            r.kv("ms_stable", false);
            r.note("second moments diverge: no stationary variance");
        }
    }
    if let Some(seed) = seed {
        let rep = stationary_moment_check(&StationaryConfig {
            params,
            p,
            g,
            trials: c.get("trials")?,
            burn_in: c.get("burn_in")?,
            horizon: c.get("horizon")?,
            master_seed: seed,
        })?;
        r.kv("mc_trials", rep.late.count())
            .kv("mc_mean_at_burn_in", rep.early.mean())
            .kv("mc_variance_at_burn_in", rep.early.variance())
            .kv("mc_mean_at_horizon", rep.late.mean())
            .kv("mc_mean_se", rep.late.std_error())
            .kv("mc_variance_at_horizon", rep.late.variance())
            .kv("mc_variance_se", rep.late.variance_std_error());
    }
    let mut a = Artifacts::default();
    a.add("moments.csv", csv);
    a.add_report(r);
    Ok(a)
}

pub fn demo(name: DemoName, c: &Config, seed: Option<u64>) -> CliResult<Artifacts> {
    let need_seed = || seed.ok_or_else(|| CliError::config("this demo is randomized: pass --seed"));
    let mut a = Artifacts::default();
    let mut r;
    match name {
        DemoName::Counterexample => {
            let params = params(c)?;
            let rep = counterexample_demo(&CounterexampleConfig {
                params,
                trials: positive(c, "trials")?,
                steps: c.get("steps")?,
                window: c.get("window")?,
                master_seed: need_seed()?,
            })?;
            r = Report::new("counterexample: a particle whose personal best never improves");
            r.kv("trials", rep.trials)
                .kv("steps", rep.steps)
                .kv("pbest_updates_particle2", rep.pbest_updates_particle2)
                .kv("particle1_moved", rep.particle1_moved)
                .kv("spread_changed", rep.spread_changed)
                .kv("equilibrium", rep.equilibrium)
                .kv("window_mean", rep.window_moments.mean())
                .kv("window_variance", rep.window_moments.variance())
                .kv("oracle_variance", rep.oracle_variance)
                .kv("closed_form_variance", rep.closed_form_variance)
                .kv("variance_rel_error", rep.variance_rel_error());
        }
        DemoName::Pbest => {
            let params = params(c)?;
            let rep = pbest_null_sequence_check(&PbestConfig {
                params,
                trials: positive(c, "trials")?,
                horizon: c.get("steps")?,
                master_seed: need_seed()?,
            })?;
            r = Report::new("spread between personal and global bests on sphere_plus");
            let q = rep.ratio_quantiles();
            r.kv("trials", rep.ratios.len())
                .kv("ratio_q25", opt_f64(q.map(|q| q[0])))
                .kv("ratio_median", opt_f64(q.map(|q| q[1])))
                .kv("ratio_q75", opt_f64(q.map(|q| q[2])));
            let mut csv = String::from("trial,initial,final,ratio\n");
            for (k, ((i, f), ratio)) in rep
                .initial
                .iter()
                .zip(&rep.final_spread)
                .zip(&rep.ratios)
                .enumerate()
            {
                csv.push_str(&format!("{k},{i},{f},{ratio}\n"));
            }
            a.add("pbest.csv", csv);
        }
        DemoName::Improvement => {
            let rep = improvement_probability_check(&ImprovementConfig {
                params: params(c)?,
                g: c.get("g")?,
                trials: positive(c, "trials")?,
                burn_in: c.get("burn_in")?,
                samples_per_trial: c.get("samples_per_trial")?,
                master_seed: need_seed()?,
            })?;
            r = Report::new("improvement-probability constants");
            r.kv("f1", rep.f1)
                .kv("delta_tail_exact", rep.delta_tail_exact)
                .kv("delta_tail_empirical", rep.delta_tail_empirical)
                .kv("epsilon_prime", rep.epsilon_prime)
                .kv("samples", rep.samples)
                .kv("chebyshev_frequency", rep.chebyshev_frequency)
                .kv("chebyshev_bound", rep.chebyshev_bound)
                .kv("chebyshev_holds", rep.chebyshev_holds())
                .kv("compound_frequency", rep.compound_frequency)
                .kv("compound_bound", rep.compound_bound)
                .kv("compound_holds", rep.compound_holds());
        }
        DemoName::SigmaY => {
            let rep = sigma_y_grid_check(
                (c.get("omega_min")?, c.get("omega_max")?),
                (c.get("phi_min")?, c.get("phi_max")?),
                positive(c, "resolution")? as usize,
            )?;
            r = Report::new("stationary Var(X - noise) against delta^2/6 where f(1) > 1/3");
            r.kv("cells_checked", rep.cells_checked)
                .kv("oracle_violations", rep.oracle_violations)
                .kv("formula_violations", rep.formula_violations);
            if let Some((w, p, s)) = rep.worst {
                r.kv("worst_omega", w)
                    .kv("worst_phi", p)
                    .kv("worst_sigma_y2_over_delta2", s);
            }
            if rep.oracle_violations > 0 {
                r.note("the exact stationary variance exceeds delta^2/6 where 1/3 < f(1) < (1+omega)/3");
            }
        }
    }
    a.add_report(r);
    Ok(a)
}
