//! Acceptance criteria as plain functions. Each returns a [`Verdict`];
//! tolerances are fixed constants in the bodies.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use swarmlab::experiments::stationary::delta_tail_probability;
use swarmlab::experiments::{
    bad_init_demo, counterexample_demo, estimate_fht, improvement_probability_check,
    sigma_y_grid_check, stagnation_demo_two_particles, stationary_moment_check, BadInitConfig,
    CounterexampleConfig, ExperimentConfig, ImprovementConfig, InitSpec, StationaryConfig,
    TwoParticleDemoConfig,
};
use swarmlab::objective::{ObjectiveKind, Sphere};
use swarmlab::regions::{cell_centres, scan_regions, spectral_agreement};
use swarmlab::stagnation::{
    expected_abs_one_minus_s_phi, expected_abs_one_minus_s_phi_quadrature, fib_closed_form, kappa,
};
use swarmlab::{Params, Purpose, Rational, RngStream, Swarm, TwoParticles};

const SEED: u64 = 20_240_917;

pub struct Verdict {
    pub pass: bool,
    pub detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn criterion_1() -> Verdict {
    let start = Instant::now();
    let grid = scan_regions((0.0, 1.0), (0.0, 4.0), 400);
    let elapsed = start.elapsed();
    let violations = grid.nesting_violations().len() + grid.noisy_violations().len();
    let interior: Vec<_> = grid
        .cells
        .iter()
        .filter(|c| c.omega > 0.0 && c.omega < 1.0)
        .collect();
    let count = |f: fn(&swarmlab::regions::RegionCell<f64>) -> bool| {
        interior.iter().filter(|c| f(c)).count()
    };
    let (ly, ms, det) = (
        count(|c| c.verdict.lyapunov),
        count(|c| c.verdict.mean_square),
        count(|c| c.verdict.deterministic),
    );
    let strict = ly < ms && ms < det;
    verdict(
        elapsed < Duration::from_secs(10) && violations == 0 && strict,
        format!(
            "scan {:.2}s (limit 10s), nesting violations {violations}, cells lyapunov {ly} < mean_square {ms} < deterministic {det}",
            elapsed.as_secs_f64()
        ),
    )
}

pub fn criterion_2() -> Verdict {
    let a = spectral_agreement((0.0, 1.0), (0.0, 4.0), 400);
    let rate = a.agreement_rate();
    verdict(
        rate >= 0.999 && a.interior_disagreements == 0 && a.not_converged == 0,
        format!(
            "agreement {:.5} (min 0.999) over {} cells, boundary disagreements {}, off-boundary disagreements {}, not converged {}",
            rate, a.cells, a.boundary_disagreements, a.interior_disagreements, a.not_converged
        ),
    )
}

pub fn criterion_3() -> Verdict {
    let r = bad_init_demo(&BadInitConfig {
        omega: 0.95,
        phi: 1.5,
        x0: 0.9,
        v0: -0.01,
        epsilon: 0.5,
        alpha: 1.0,
        compare_steps: 10_000,
        trials: 100,
        budget: 1_000_000,
        master_seed: SEED,
    });
    let r = match r {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let tol = 1e-12;
    verdict(
        r.event_as_printed && r.event_sufficient && r.max_rel_error_x <= tol && r.max_rel_error_v <= tol && r.fht.hits == 0 && r.fht.trials == 100,
        format!(
            "event {} (sufficient form {}), max rel error x {:.2e} v {:.2e} (limit 1e-12), censored {}/{}, limit {:.6} vs radius {}",
            r.event_as_printed, r.event_sufficient, r.max_rel_error_x, r.max_rel_error_v, r.fht.censored, r.fht.trials,
            r.limit, r.radius
        ),
    )
}

pub fn criterion_4() -> Verdict {
    let params = Params::new(0.07, 0.0, 1.5, 0.0, 1.0, 0.5, 2, 1).expect("valid parameters");
    let cfg = TwoParticleDemoConfig {
        params,
        init: TwoParticles::new(184.0, 185.0, -1.0, -1.0),
        trials: 10_000,
        steps: 100_000,
        checkpoints: vec![10, 50, 200],
        master_seed: SEED,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("pool");
    let start = Instant::now();
    let r = pool.install(|| stagnation_demo_two_particles(&cfg));
    let elapsed = start.elapsed();
    let r = match r {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let sums_ok = r.velocity_sums_within_bound() == Some(true);
    let dist_ok = r.distances_within_bound();
    let d: Vec<String> = r
        .checkpoints
        .iter()
        .map(|c| format!("t={} {:.3e}<={:.3e}", c.t, c.abs_distance.mean(), c.bound))
        .collect();
    verdict(
        r.entered == 0 && sums_ok && dist_ok && elapsed < Duration::from_secs(300),
        format!(
            "entered {}/{}, mean velocity sums {:.4} {:.4} vs bound {:.4}, E|D| {}, {:.2}s single-threaded",
            r.entered,
            r.trials,
            r.velocity_sums[0].mean(),
            r.velocity_sums[1].mean(),
            r.velocity_sum_bound.unwrap_or(f64::NAN),
            d.join(" "),
            elapsed.as_secs_f64()
        ),
    )
}

pub fn criterion_5() -> Verdict {
    let r = match counterexample_demo(&CounterexampleConfig::standard(
        100, 1_000_000, 100_000, SEED,
    )) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let err = r.variance_rel_error();
    verdict(
        r.pbest_updates_particle2 == 0 && err <= 0.10,
        format!(
            "particle-2 best updates {}, window variance {:.6} vs oracle {:.6} (rel {:.2e}, limit 0.10)",
            r.pbest_updates_particle2,
            r.window_moments.variance(),
            r.oracle_variance,
            err
        ),
    )
}

pub fn criterion_6() -> Verdict {
    let params = Params::new(0.4, 1.5, 1.5, 0.1, 1.0, 0.01, 1, 1).expect("valid parameters");
    let r = match stationary_moment_check(&StationaryConfig {
        params,
        p: 0.0,
        g: 0.0,
        trials: 100_000,
        burn_in: 2000,
        horizon: 4000,
        master_seed: SEED,
    }) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let target = 0.1f64.powi(2) / (12.0 * r.f1);
    let var_err = r.late_variance_rel_error(target);
    let var_ok = var_err <= 0.05;
    let mean_ok = r.mean_within(3.0);
    let gap = r.oracle_closed_form_rel_gap();
    let gap_ok = gap <= 1e-9;
    verdict(
        var_ok && mean_ok && gap_ok,
        format!(
            "variance {:.6e} vs target {:.6e} (rel {:.3}, limit 0.05: {}); vs oracle {:.6e} (rel {:.2e}); mean {:.2e} se {:.2e} ({}); oracle vs closed form rel {:.1e} (limit 1e-9: {})",
            r.late.variance(),
            target,
            var_err,
            ok(var_ok),
            r.oracle_variance,
            r.late_variance_rel_error(r.oracle_variance),
            r.late.mean(),
            r.late.std_error(),
            ok(mean_ok),
            gap,
            ok(gap_ok)
        ),
    )
}

pub fn criterion_7() -> Verdict {
    let exact = delta_tail_probability(Rational::new(4999, 10_000));
    let exact_ok = exact.as_ref().ok() == Some(&Rational::new(1, 10_000));
    let params = Params::new(0.4, 1.5, 1.5, 0.01, 1.0, 0.01, 1, 1).expect("valid parameters");
    let imp = improvement_probability_check(&ImprovementConfig {
        params,
        g: 1.0,
        trials: 100,
        burn_in: 2000,
        samples_per_trial: 100_000,
        master_seed: SEED,
    });
    let imp = match imp {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let compound_ok = imp.samples >= 10_000_000 && imp.compound_holds();
    let grid = match sigma_y_grid_check((0.0, 1.0), (0.0, 4.0), 400) {
        Ok(g) => g,
        Err(e) => return verdict(false, format!("error: {e}")),
    };
    let grid_ok = grid.oracle_violations == 0;
    let worst = grid
        .worst
        .map(|(w, p, s)| format!("max sigma_y^2/delta^2 {s:.4} at omega {w:.4} phi {p:.4}"))
        .unwrap_or_default();
    verdict(
        exact_ok && compound_ok && grid_ok,
        format!(
            "tail {} ({}); compound frequency {:.3e} vs 3e-5 over {} samples ({}); sigma_y grid {} cells, exact violations {} ({}), closed-form violations {}, {worst}; chebyshev {:.4} vs {:.4}",
            exact.map(|r| r.to_string()).unwrap_or_else(|e| e.to_string()),
            ok(exact_ok),
            imp.compound_frequency,
            imp.samples,
            ok(compound_ok),
            grid.cells_checked,
            grid.oracle_violations,
            ok(grid_ok),
            grid.formula_violations,
            imp.chebyshev_frequency,
            imp.chebyshev_bound
        ),
    )
}

fn noisy_sphereplus(master_seed: u64) -> swarmlab::Result<swarmlab::experiments::FhtEstimate> {
    let params = Params::new(0.4, 1.5, 1.5, 0.01, 1.0, 1e-4, 3, 1)?;
    estimate_fht(&ExperimentConfig {
        params,
        objective: ObjectiveKind::SpherePlus,
        init: InitSpec::Random,
        trials: 100,
        budget: 10_000_000,
        master_seed,
    })
}

pub fn criterion_8() -> Verdict {
    let (a, b) = match (noisy_sphereplus(SEED), noisy_sphereplus(SEED + 1)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return verdict(false, format!("error: {e}")),
    };
    let (ma, mb) = (
        a.median_over_hits.unwrap_or(f64::NAN),
        b.median_over_hits.unwrap_or(f64::NAN),
    );
    let drift = (ma / mb - 1.0).abs();
    verdict(
        a.hits >= 98 && b.hits >= 98 && drift <= 0.20,
        format!(
            "hits {}/100 and {}/100 (min 98), median evals {ma} and {mb} (rel drift {drift:.3}, limit 0.20), hit interval [{:.3}, {:.3}]",
            a.hits, b.hits, a.hit_probability_interval.0, a.hit_probability_interval.1
        ),
    )
}

fn fib_recurrence(c: f64, a1: f64, a2: f64, n: u32) -> f64 {
    let (mut prev, mut cur) = (a1, a2);
    if n == 1 {
        return a1;
    }
    for _ in 2..n {
        let next = c * (cur + prev);
        prev = cur;
        cur = next;
    }
    cur
}

pub fn criterion_9() -> Verdict {
    let mut fib_err = 0.0f64;
    for c in [0.3, 0.5, 1.0, 1.7] {
        for (a1, a2) in [(1.0, 1.0), (2.0, 0.5), (0.1, 3.0)] {
            for n in 1..=60 {
                let closed = fib_closed_form(c, a1, a2, n).expect("valid c");
                fib_err = fib_err.max(rel(closed, fib_recurrence(c, a1, a2, n)));
            }
        }
    }
    let mut quad_err = 0.0f64;
    for phi in [1.1, 1.5, 1.9] {
        let closed = expected_abs_one_minus_s_phi(phi).expect("phi > 1");
        quad_err = quad_err.max((closed - expected_abs_one_minus_s_phi_quadrature(phi)).abs());
    }
    // lambda assembled independently from the quadrature value of E|1 - S phi|
    let mut kappa_err = 0.0f64;
    for omega in cell_centres(0.0, 1.0, 100) {
        for phi in cell_centres(1.0, 2.0, 100) {
            let lam = 2.0 * expected_abs_one_minus_s_phi_quadrature(phi) + 2.0 * omega;
            let identity = (lam + (8.0 * lam + lam * lam).sqrt()) / 4.0;
            kappa_err = kappa_err.max((kappa(omega, phi).expect("phi > 0") - identity).abs());
        }
    }
    verdict(
        fib_err <= 1e-9 && quad_err <= 1e-10 && kappa_err <= 1e-12,
        format!(
            "fibonacci max rel {fib_err:.1e} (limit 1e-9), quadrature max abs {quad_err:.1e} (limit 1e-10), kappa identity max abs {kappa_err:.1e} (limit 1e-12)"
        ),
    )
}

fn run_cli(args: &[&str], out: &Path) -> Result<(), String> {
    let mut argv: Vec<String> = std::iter::once("swarmlab")
        .chain(args.iter().copied())
        .map(String::from)
        .collect();
    argv.extend([
        "--threads".into(),
        "1".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    match swarmlab_cli::main_with_args(&argv) {
        0 => Ok(()),
        code => Err(format!("{args:?} exited with {code}")),
    }
}

fn artifact_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.file_name().is_some_and(|x| x != "manifest.txt"))
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        fs::read(&p).unwrap_or_default(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

/// Straight Basic PSO loop on the shared stream, written independently of the engine.
fn reference_basic(m: usize, n: usize, steps: u64, stream: &RngStream) -> Vec<f64> {
    let (omega, phi1, phi2) = (0.4, 1.5, 1.5);
    let mut x: Vec<f64> = Vec::new();
    let mut v: Vec<f64> = Vec::new();
    for i in 0..m as u64 {
        for j in 0..n as u64 {
            x.push(stream.uniform_in(-1.0, 1.0, i, j, 0, Purpose::InitX));
            v.push(stream.uniform_in(-1.0, 1.0, i, j, 0, Purpose::InitV));
        }
    }
    let f = |z: &[f64]| z.iter().map(|a| a * a).sum::<f64>();
    let mut p = x.clone();
    let mut pv: Vec<f64> = p.chunks(n).map(f).collect();
    let best = |pv: &[f64]| (0..pv.len()).fold(0, |b, i| if pv[i] < pv[b] { i } else { b });
    let mut out = Vec::new();
    for t in 0..steps {
        let gi = best(&pv);
        let g: Vec<f64> = p[gi * n..(gi + 1) * n].to_vec();
        for i in 0..m {
            for (j, &gj) in g.iter().enumerate() {
                let k = i * n + j;
                let r = stream.uniform(i as u64, j as u64, t, Purpose::R);
                let s = stream.uniform(i as u64, j as u64, t, Purpose::S);
                v[k] = omega * v[k] + phi1 * r * (p[k] - x[k]) + phi2 * s * (gj - x[k]);
                x[k] += v[k];
            }
            let fx = f(&x[i * n..(i + 1) * n]);
            if fx < pv[i] {
                pv[i] = fx;
                p[i * n..(i + 1) * n].copy_from_slice(&x[i * n..(i + 1) * n]);
            }
        }
        out.extend_from_slice(&x);
    }
    out
}

pub fn criterion_10() -> Verdict {
    let tmp = match tempfile::tempdir() {
        Ok(t) => t,
        Err(e) => return verdict(false, format!("tempdir: {e}")),
    };
    let runs: [&[&str]; 9] = [
        &[
            "simulate",
            "--preset",
            "noisy-sphereplus",
            "--override",
            "budget=3000",
            "--seed",
            "7",
        ],
        &[
            "fht",
            "--preset",
            "noisy-sphereplus",
            "--override",
            "trials=20",
            "--seed",
            "7",
        ],
        &["regions", "--resolution", "40"],
        &[
            "stagnate",
            "--preset",
            "thm2-example",
            "--override",
            "trials=200",
            "--seed",
            "7",
        ],
        &[
            "stagnate",
            "--preset",
            "prop1-bad-init",
            "--override",
            "trials=5",
            "--override",
            "budget=10000",
            "--seed",
            "7",
        ],
        &[
            "moments",
            "--override",
            "monte_carlo=true",
            "--override",
            "trials=500",
            "--seed",
            "7",
        ],
        &[
            "demo",
            "counterexample",
            "--override",
            "trials=3",
            "--override",
            "steps=5000",
            "--override",
            "window=1000",
            "--seed",
            "7",
        ],
        &[
            "demo",
            "pbest",
            "--override",
            "trials=5",
            "--override",
            "steps=500",
            "--seed",
            "7",
        ],
        &[
            "demo",
            "improvement",
            "--override",
            "delta=0.01",
            "--override",
            "trials=2",
            "--override",
            "samples_per_trial=2000",
            "--seed",
            "7",
        ],
    ];
    let mut compared = 0usize;
    let mut mismatched = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let (a, b) = (
            tmp.path().join(format!("{k}a")),
            tmp.path().join(format!("{k}b")),
        );
        if let Err(e) = run_cli(args, &a).and_then(|_| run_cli(args, &b)) {
            return verdict(false, e);
        }
        let (fa, fb) = (artifact_files(&a), artifact_files(&b));
        if fa.is_empty() || fa != fb {
            mismatched.push(args[0].to_string());
        }
        compared += fa.len();
    }

    let (m, n, steps) = (3usize, 2usize, 2000u64);
    let params = Params::new(0.4, 1.5, 1.5, 0.0, 1.0, 1e-300, m, n).expect("valid parameters");
    let stream = RngStream::new(SEED, 0);
    let mut swarm = Swarm::init(&params, &Sphere, &stream);
    let mut engine = Vec::new();
    for _ in 0..steps {
        swarm.step(&params, &Sphere, &stream);
        engine.extend_from_slice(swarm.positions());
    }
    let reference = reference_basic(m, n, steps, &stream);
    let bit_identical = engine.len() == reference.len()
        && engine
            .iter()
            .zip(&reference)
            .all(|(a, b)| a.to_bits() == b.to_bits());

    verdict(
        mismatched.is_empty() && bit_identical,
        format!(
            "{compared} artifacts (csv and reports) over {} commands byte-identical across runs (mismatches: {:?}); delta=0 engine vs basic loop bit-identical over {} steps: {}",
            runs.len(),
            mismatched,
            steps,
            bit_identical
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

/// Every criterion with its number, in order.
pub const ALL: [(u32, fn() -> Verdict); 10] = [
    (1, criterion_1),
    (2, criterion_2),
    (3, criterion_3),
    (4, criterion_4),
    (5, criterion_5),
    (6, criterion_6),
    (7, criterion_7),
    (8, criterion_8),
    (9, criterion_9),
    (10, criterion_10),
];
