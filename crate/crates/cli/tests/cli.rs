use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn swarmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swarmlab"))
        .args(args)
        .env_remove("SWARMLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = swarmlab(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn manifest_value(dir: &Path, key: &str) -> String {
    let text = String::from_utf8(read(dir, "manifest.txt")).unwrap();
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
        .unwrap_or_else(|| panic!("{key} missing from manifest"))
}

const NOISY_CFG: &str =
    "# noisy run\nobjective = sphere_plus\nomega = 0.4\nphi1 = 1.5\nphi2 = 1.5\n\
delta = 0.01\nm = 3\nepsilon = 1e-6\nbudget = 3000\nsample_every = 5\n";

#[test]
fn simulate_is_deterministic_and_manifested() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("noisy.cfg");
    fs::write(&cfg, NOISY_CFG).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        ok(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            "42",
            "--output-dir",
            dir.to_str().unwrap(),
        ]);
    }
    let csv = read(&a, "trajectory.csv");
    assert!(csv.starts_with(b"t,particle,dim,x,v,p,g,f_g\n"));
    assert_eq!(csv, read(&b, "trajectory.csv"));
    assert_eq!(read(&a, "manifest.txt"), read(&b, "manifest.txt"));
    assert_eq!(manifest_value(&a, "seed"), "42");
    assert_eq!(manifest_value(&a, "config.delta"), "0.01");
    let sum = swarmlab_cli::manifest::sha256_hex(&csv);
    assert_eq!(manifest_value(&a, "artifact.trajectory.csv.sha256"), sum);
    assert_eq!(
        manifest_value(&a, "config_file_sha256"),
        swarmlab_cli::manifest::sha256_hex(NOISY_CFG.as_bytes())
    );
}

#[test]
fn override_delta_zero_matches_basic_config() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("noisy.cfg");
    fs::write(&cfg, NOISY_CFG).unwrap();
    let basic = tmp.path().join("basic.cfg");
    fs::write(&basic, NOISY_CFG.replace("delta = 0.01", "delta = 0")).unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--override",
        "delta=0",
        "--seed",
        "5",
        "--output-dir",
        a.to_str().unwrap(),
    ]);
    ok(&[
        "simulate",
        "--config",
        basic.to_str().unwrap(),
        "--seed",
        "5",
        "--output-dir",
        b.to_str().unwrap(),
    ]);
    assert_eq!(read(&a, "trajectory.csv"), read(&b, "trajectory.csv"));
    assert_eq!(
        manifest_value(&a, "input_hash"),
        manifest_value(&b, "input_hash")
    );
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = out.to_str().unwrap();
    // unknown override key
    assert_eq!(
        swarmlab(&[
            "fht",
            "--seed",
            "1",
            "--override",
            "bogus=1",
            "--output-dir",
            o
        ])
        .status
        .code(),
        Some(2)
    );
    // randomized command without a seed
    assert_eq!(swarmlab(&["fht", "--output-dir", o]).status.code(), Some(2));
    // unreadable config
    assert_eq!(
        swarmlab(&[
            "fht",
            "--seed",
            "1",
            "--config",
            "/nonexistent/x.cfg",
            "--output-dir",
            o
        ])
        .status
        .code(),
        Some(2)
    );
    // invalid parameters
    assert_eq!(
        swarmlab(&[
            "fht",
            "--seed",
            "1",
            "--override",
            "alpha=-1",
            "--output-dir",
            o
        ])
        .status
        .code(),
        Some(2)
    );
    // bad ranges
    assert_eq!(
        swarmlab(&[
            "regions",
            "--omega-min",
            "1",
            "--omega-max",
            "0",
            "--output-dir",
            o
        ])
        .status
        .code(),
        Some(2)
    );
    // unknown preset
    assert_eq!(
        swarmlab(&["stagnate", "--preset", "nope", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    // output directory blocked by a regular file
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let blocked = blocker.join("sub");
    assert_eq!(
        swarmlab(&[
            "regions",
            "--resolution",
            "2",
            "--output-dir",
            blocked.to_str().unwrap()
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn regions_tiny_grid_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    ok(&["regions", "--resolution", "2", "--svg", "--output-dir", o]);
    let csv = String::from_utf8(read(tmp.path(), "regions.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "omega,phi,f1,deterministic,lyapunov,mean_square,noisy_fht,pbest_convergence"
    );
    assert_eq!(lines.len(), 5);
    assert!(read(tmp.path(), "regions.svg").starts_with(b"<svg"));
    assert_eq!(manifest_value(tmp.path(), "seed"), "none");
}

#[test]
fn stagnate_preset_reports_threshold_note() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    let out = ok(&[
        "stagnate",
        "--preset",
        "thm2-example",
        "--override",
        "trials=50",
        "--seed",
        "3",
        "--output-dir",
        o,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("condition.positions_above_threshold = false"));
    assert!(text.contains("do not exceed the position threshold"));
    assert!(text.contains("entered_ball = 0"));
    assert!(read(tmp.path(), "distance.csv").starts_with(b"t,mean_abs_d"));
}

#[test]
fn stagnate_bad_init_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    let out = ok(&[
        "stagnate",
        "--preset",
        "prop1-bad-init",
        "--override",
        "trials=3",
        "--seed",
        "3",
        "--output-dir",
        o,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("hits = 0"));
    assert!(text.contains("event_sufficient = true"));
}

#[test]
fn moments_table() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    let out = ok(&[
        "moments",
        "--omega",
        "0.4",
        "--phi",
        "1.5",
        "--delta",
        "0.1",
        "--output-dir",
        o,
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("f1 = 0.645"));
    assert!(text.contains("oracle_variance = 0.00180878552971"));
    assert!(read(tmp.path(), "moments.csv").starts_with(b"t,mean,variance,second_moment\n"));
    // the Monte Carlo part needs a seed
    assert_eq!(
        swarmlab(&[
            "moments",
            "--override",
            "monte_carlo=true",
            "--output-dir",
            o
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn demos_run() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    let out = ok(&[
        "demo",
        "counterexample",
        "--preset",
        "sec4-counterexample",
        "--override",
        "trials=2",
        "--override",
        "steps=20000",
        "--override",
        "window=10000",
        "--seed",
        "1",
        "--output-dir",
        o,
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("pbest_updates_particle2 = 0"));
    let out = ok(&[
        "demo",
        "sigma-y",
        "--override",
        "resolution=20",
        "--output-dir",
        o,
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("cells_checked"));
    let out = ok(&[
        "demo",
        "improvement",
        "--override",
        "delta=0.01",
        "--override",
        "g=1",
        "--override",
        "trials=2",
        "--override",
        "samples_per_trial=1000",
        "--seed",
        "2",
        "--output-dir",
        o,
    ]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("delta_tail_exact = 1/10000"));
    ok(&[
        "demo",
        "pbest",
        "--override",
        "trials=3",
        "--override",
        "steps=500",
        "--seed",
        "2",
        "--output-dir",
        o,
    ]);
    assert!(read(tmp.path(), "pbest.csv").starts_with(b"trial,initial,final,ratio\n"));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let base = [
        "fht",
        "--preset",
        "noisy-sphereplus",
        "--override",
        "trials=40",
        "--seed",
        "11",
    ];
    let mut args_a = base.to_vec();
    args_a.extend(["--threads", "1", "--output-dir", a.to_str().unwrap()]);
    ok(&args_a);
    let out = Command::new(env!("CARGO_BIN_EXE_swarmlab"))
        .args(base)
        .args(["--output-dir", b.to_str().unwrap()])
        .env("SWARMLAB_THREADS", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(&a, "fht.csv"), read(&b, "fht.csv"));
    assert_eq!(manifest_value(&b, "threads"), "3");
}

#[test]
fn seed_auto_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    let o = tmp.path().to_str().unwrap();
    ok(&[
        "fht",
        "--preset",
        "noisy-sphereplus",
        "--override",
        "trials=2",
        "--seed",
        "auto",
        "--output-dir",
        o,
    ]);
    assert_eq!(manifest_value(tmp.path(), "seed_mode"), "auto");
    assert!(manifest_value(tmp.path(), "seed").parse::<u64>().is_ok());
}
