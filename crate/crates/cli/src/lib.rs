//! Command-line front end: configuration layering, seeds, thread pools and
//! artifact/manifest writing around the `swarmlab` experiments.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod presets;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use crate::commands::{Artifacts, DemoName};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::manifest::{sha256_hex, Manifest};

#[derive(Debug, Parser)]
#[command(name = "swarmlab", version, about = "Basic and Noisy PSO experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Embedded configuration applied before the file and overrides.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    /// `key=value`, same syntax and keys as the config file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long, value_name = "DIR", default_value = "swarmlab-out")]
    pub output_dir: PathBuf,
    /// Master seed (unsigned 64-bit) or `auto` for a time-based seed.
    #[arg(long, value_name = "SEED|auto")]
    pub seed: Option<String>,
    /// Worker threads; 0 or unset lets the pool decide.
    #[arg(long, env = "SWARMLAB_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one trial and dump its trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the first hitting time over many trials.
    Fht {
        #[command(flatten)]
        common: Common,
    },
    /// Scan convergence regions over an (omega, phi) grid.
    Regions {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        #[arg(long)]
        phi_min: Option<f64>,
        #[arg(long)]
        phi_max: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Also render the nested regions as SVG.
        #[arg(long)]
        svg: bool,
    },
    /// Stagnation demos: `mode = two-particle` or `mode = bad-init`.
    Stagnate {
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form moment limits against the exact recurrence.
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        omega: Option<f64>,
        /// Sets both phi1 and phi2.
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long)]
        phi1: Option<f64>,
        #[arg(long)]
        phi2: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        g: Option<f64>,
    },
    /// Named demonstrations.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Simulate { common }
            | Command::Fht { common }
            | Command::Regions { common, .. }
            | Command::Stagnate { common }
            | Command::Moments { common, .. }
            | Command::Demo { common, .. } => common,
        }
    }

    fn name(&self) -> String {
        match self {
            Command::Simulate { .. } => "simulate".into(),
            Command::Fht { .. } => "fht".into(),
            Command::Regions { .. } => "regions".into(),
            Command::Stagnate { .. } => "stagnate".into(),
            Command::Moments { .. } => "moments".into(),
            Command::Demo { name, .. } => {
                let n = clap::ValueEnum::to_possible_value(name).expect("named variant");
                format!("demo {}", n.get_name())
            }
        }
    }

    /// Dedicated flags, applied after `--override`.
    fn flag_overrides(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut push = |k: &'static str, v: Option<String>| {
            if let Some(v) = v {
                out.push((k, v));
            }
        };
        match self {
            Command::Regions {
                omega_min,
                omega_max,
                phi_min,
                phi_max,
                resolution,
                svg,
                ..
            } => {
                push("omega_min", omega_min.map(|v| v.to_string()));
                push("omega_max", omega_max.map(|v| v.to_string()));
                push("phi_min", phi_min.map(|v| v.to_string()));
                push("phi_max", phi_max.map(|v| v.to_string()));
                push("resolution", resolution.map(|v| v.to_string()));
                push("svg", svg.then(|| "true".to_string()));
            }
            Command::Moments {
                omega,
                phi,
                phi1,
                phi2,
                delta,
                p,
                g,
                ..
            } => {
                push("omega", omega.map(|v| v.to_string()));
                push("phi1", phi.map(|v| v.to_string()));
                push("phi2", phi.map(|v| v.to_string()));
                push("phi1", phi1.map(|v| v.to_string()));
                push("phi2", phi2.map(|v| v.to_string()));
                push("delta", delta.map(|v| v.to_string()));
                push("p", p.map(|v| v.to_string()));
                push("g", g.map(|v| v.to_string()));
            }
            _ => {}
        }
        out
    }

    fn is_randomized(&self, c: &Config) -> CliResult<bool> {
        Ok(match self {
            Command::Simulate { .. } | Command::Fht { .. } | Command::Stagnate { .. } => true,
            Command::Regions { .. } => false,
            Command::Moments { .. } => c.get_bool("monte_carlo")?,
            Command::Demo { name, .. } => *name != DemoName::SigmaY,
        })
    }
}

/// Where the resolved configuration came from.
struct Resolved {
    config: Config,
    source: String,
    file_sha256: Option<String>,
}

fn resolve_config(cmd: &Command) -> CliResult<Resolved> {
    let common = cmd.common();
    let mut config = Config::default();
    if let Some(name) = &common.preset {
        let text = presets::lookup(name).ok_or_else(|| {
            CliError::config(format!(
                "unknown preset `{name}` (known: {})",
                presets::names().join(", ")
            ))
        })?;
        config.apply_text(text, &format!("preset {name}"))?;
    }
    let (mut source, mut file_sha256) = ("none".to_string(), None);
    if let Some(path) = &common.config {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| CliError::config(format!("config {} is not UTF-8", path.display())))?;
        config.apply_text(&text, &path.display().to_string())?;
        source = path.display().to_string();
        file_sha256 = Some(sha256_hex(&bytes));
    }
    for kv in &common.overrides {
        config.apply_override(kv)?;
    }
    for (k, v) in cmd.flag_overrides() {
        config.set(k, &v)?;
    }
    Ok(Resolved {
        config,
        source,
        file_sha256,
    })
}

fn resolve_seed(arg: Option<&str>, randomized: bool) -> CliResult<(Option<u64>, &'static str)> {
    match arg {
        None if randomized => Err(CliError::config(
            "this command is randomized: pass --seed <u64> or --seed auto",
        )),
        None => Ok((None, "none")),
        Some("auto") => {
            let nanos = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_err(|e| CliError::config(format!("system clock before epoch: {e}")))?
                .as_nanos();
            Ok((Some(nanos as u64 ^ (nanos >> 64) as u64), "auto"))
        }
        Some(s) => s.parse::<u64>().map(|v| (Some(v), "fixed")).map_err(|_| {
            CliError::config(format!(
                "--seed expects an unsigned 64-bit integer or `auto`, got `{s}`"
            ))
        }),
    }
}

fn execute(cmd: &Command, c: &Config, seed: Option<u64>) -> CliResult<Artifacts> {
    let seeded = || seed.ok_or_else(|| CliError::config("missing seed"));
    match cmd {
        Command::Simulate { .. } => commands::simulate(c, seeded()?),
        Command::Fht { .. } => commands::fht(c, seeded()?),
        Command::Regions { .. } => commands::regions(c),
        Command::Stagnate { .. } => commands::stagnate(c, seeded()?),
        Command::Moments { .. } => commands::moments(
            c,
            if c.get_bool("monte_carlo")? {
                seed
            } else {
                None
            },
        ),
        Command::Demo { name, .. } => commands::demo(*name, c, seed),
    }
}

fn write_file(dir: &Path, name: &str, bytes: &[u8]) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, bytes).map_err(|e| CliError::io(path, e))
}

/// Runs a parsed command; returns the summary printed on success.
pub fn run(cli: &Cli) -> CliResult<String> {
    let cmd = &cli.command;
    let common = cmd.common();
    let resolved = resolve_config(cmd)?;
    let (seed, seed_mode) =
        resolve_seed(common.seed.as_deref(), cmd.is_randomized(&resolved.config)?)?;

    let threads = common.threads.unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config(format!("cannot build thread pool: {e}")))?;
    let artifacts = pool.install(|| execute(cmd, &resolved.config, seed))?;

    let dir = &common.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut sums = Vec::with_capacity(artifacts.files.len());
    for (name, bytes) in &artifacts.files {
        write_file(dir, name, bytes)?;
        sums.push((name.clone(), sha256_hex(bytes)));
    }
    let manifest = Manifest {
        command: cmd.name(),
        config_source: resolved.source,
        config_file_sha256: resolved.file_sha256,
        preset: common.preset.clone(),
        seed,
        seed_mode,
        threads: if threads == 0 {
            "auto".into()
        } else {
            threads.to_string()
        },
        resolved_config: resolved.config.render(),
        artifacts: sums,
    };
    write_file(dir, "manifest.txt", manifest.render().as_bytes())?;

    let mut summary = artifacts.summary;
    for (name, _) in &artifacts.files {
        summary.push_str(&format!("# wrote {}\n", dir.join(name).display()));
    }
    summary.push_str(&format!("# wrote {}\n", dir.join("manifest.txt").display()));
    Ok(summary)
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(summary) => {
            print!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("swarmlab: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_resolution() {
        assert!(resolve_seed(None, true).is_err());
        assert_eq!(resolve_seed(None, false).unwrap(), (None, "none"));
        assert_eq!(resolve_seed(Some("42"), true).unwrap(), (Some(42), "fixed"));
        assert_eq!(resolve_seed(Some("auto"), true).unwrap().1, "auto");
        assert!(resolve_seed(Some("-1"), true).is_err());
        assert!(resolve_seed(Some("x"), false).is_err());
    }

    #[test]
    fn layering_order() {
        let cli = Cli::try_parse_from([
            "swarmlab",
            "moments",
            "--preset",
            "thm2-example",
            "--override",
            "omega=0.3",
            "--omega",
            "0.2",
            "--phi",
            "1.1",
        ])
        .unwrap();
        let r = resolve_config(&cli.command).unwrap();
        assert_eq!(r.config.raw("omega"), "0.2");
        assert_eq!(r.config.raw("phi1"), "1.1");
        assert_eq!(r.config.raw("m"), "2");
    }

    #[test]
    fn demo_names() {
        let cli = Cli::try_parse_from(["swarmlab", "demo", "sigma-y"]).unwrap();
        assert_eq!(cli.command.name(), "demo sigma-y");
        assert!(!cli.command.is_randomized(&Config::default()).unwrap());
    }
}
