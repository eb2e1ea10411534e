//! Flat `key = value` configuration shared by every subcommand.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Every accepted key with its default. Subcommands read the subset they need.
pub const KEYS: &[(&str, &str)] = &[
    ("alpha", "1"),
    ("ball_radius", "0.5"),
    ("budget", "100000"),
    ("burn_in", "2000"),
    ("checkpoints", "10, 50, 200"),
    ("compare_steps", "10000"),
    ("delta", "0"),
    ("epsilon", "0.0001"),
    ("g", "0"),
    ("horizon", "4000"),
    ("init", "random"),
    ("init_positions", ""),
    ("init_velocities", ""),
    ("m", "3"),
    ("mode", "two-particle"),
    ("moment_steps", "200"),
    ("monte_carlo", "false"),
    ("n", "1"),
    ("objective", "sphere"),
    ("omega", "0.4"),
    ("omega_max", "1"),
    ("omega_min", "0"),
    ("p", "0"),
    ("phi1", "1.5"),
    ("phi2", "1.5"),
    ("phi_max", "4"),
    ("phi_min", "0"),
    ("resolution", "400"),
    ("sample_every", "1"),
    ("samples_per_trial", "100000"),
    ("steps", "100000"),
    ("svg", "false"),
    ("trial", "0"),
    ("trials", "100"),
    ("window", "100000"),
    ("x_start", "1"),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            values: KEYS
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_text(text: &str, source: &str) -> CliResult<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) =
            parse_pair(line).map_err(|e| CliError::config(format!("{source}:{}: {e}", no + 1)))?;
        if out.iter().any(|(seen, _)| *seen == k) {
            return Err(CliError::config(format!(
                "{source}:{}: duplicate key `{k}`",
                no + 1
            )));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn parse_pair(line: &str) -> Result<(String, String), String> {
    let (k, v) = line
        .split_once('=')
        .ok_or_else(|| format!("expected `key = value`, got `{line}`"))?;
    let k = k.trim();
    if k.is_empty() {
        return Err("empty key".into());
    }
    Ok((k.to_string(), v.trim().to_string()))
}

impl Config {
    pub fn set(&mut self, key: &str, value: &str) -> CliResult<()> {
        match self.values.get_mut(key) {
            Some(slot) => {
                *slot = value.to_string();
                Ok(())
            }
            None => Err(CliError::config(format!("unknown key `{key}`"))),
        }
    }

    pub fn apply_text(&mut self, text: &str, source: &str) -> CliResult<()> {
        for (k, v) in parse_text(text, source)? {
            self.set(&k, &v)
                .map_err(|e| CliError::config(format!("{source}: {e}")))?;
        }
        Ok(())
    }

    /// `key=value` exactly as it would appear in a config file.
    pub fn apply_override(&mut self, kv: &str) -> CliResult<()> {
        let (k, v) =
            parse_pair(kv.trim()).map_err(|e| CliError::config(format!("--override: {e}")))?;
        self.set(&k, &v)
            .map_err(|e| CliError::config(format!("--override: {e}")))
    }

    pub fn raw(&self, key: &str) -> &str {
        self.values
            .get(key)
            .map(String::as_str)
            .unwrap_or_else(|| panic!("key `{key}` missing from KEYS"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key);
        raw.parse()
            .map_err(|e| CliError::config(format!("key `{key}`: cannot parse `{raw}`: {e}")))
    }

    pub fn get_bool(&self, key: &str) -> CliResult<bool> {
        match self.raw(key) {
            "true" | "1" | "yes" => Ok(true),
            "false" | "0" | "no" => Ok(false),
            other => Err(CliError::config(format!(
                "key `{key}`: expected a boolean, got `{other}`"
            ))),
        }
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> CliResult<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(key);
        if raw.trim().is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|e| {
                    CliError::config(format!("key `{key}`: cannot parse `{item}`: {e}"))
                })
            })
            .collect()
    }

    /// Canonical rendering: sorted `key = value` lines.
    pub fn render(&self) -> String {
        self.values
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_unique() {
        for w in KEYS.windows(2) {
            assert!(w[0].0 < w[1].0, "{} / {}", w[0].0, w[1].0);
        }
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# header\n\nomega = 0.7  # trailing\n  m=2\n";
        let pairs = parse_text(text, "t").unwrap();
        assert_eq!(
            pairs,
            vec![("omega".into(), "0.7".into()), ("m".into(), "2".into())]
        );
    }

    #[test]
    fn rejects_unknown_duplicate_and_malformed() {
        let mut c = Config::default();
        assert!(c.apply_text("bogus = 1", "t").is_err());
        assert!(c.apply_text("m = 1\nm = 2", "t").is_err());
        assert!(c.apply_text("just words", "t").is_err());
        assert!(c.apply_text(" = 3", "t").is_err());
        assert!(c.apply_override("nokey").is_err());
        assert!(c.apply_override("bogus=1").is_err());
    }

    #[test]
    fn override_mirrors_file_syntax() {
        let mut a = Config::default();
        let mut b = Config::default();
        a.apply_text("delta = 0.25", "t").unwrap();
        b.apply_override("delta=0.25").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.get::<f64>("delta").unwrap(), 0.25);
    }

    #[test]
    fn typed_getters() {
        let mut c = Config::default();
        c.apply_text("init_positions = 1, 2.5 ,3\nsvg = yes\nm = x", "t")
            .unwrap();
        assert_eq!(
            c.get_list::<f64>("init_positions").unwrap(),
            vec![1.0, 2.5, 3.0]
        );
        assert!(c.get_bool("svg").unwrap());
        assert!(c.get::<usize>("m").is_err());
        assert!(c.get_list::<f64>("init_velocities").unwrap().is_empty());
    }
}
