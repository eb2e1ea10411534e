//! Run manifest: resolved inputs and checksums of every emitted file.

use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub config_source: String,
    pub config_file_sha256: Option<String>,
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub seed_mode: &'static str,
    pub threads: String,
    pub resolved_config: String,
    pub artifacts: Vec<(String, String)>,
}

impl Manifest {
    /// Hash over everything that determines the outputs.
    pub fn input_hash(&self) -> String {
        let seed = self
            .seed
            .map_or_else(|| "none".to_string(), |s| s.to_string());
        let canonical = format!(
            "command = {}\nseed = {seed}\n{}",
            self.command, self.resolved_config
        );
        sha256_hex(canonical.as_bytes())
    }

    pub fn render(&self) -> String {
        let mut out = String::from("# swarmlab run manifest\n");
        let mut kv = |k: &str, v: &str| out.push_str(&format!("{k} = {v}\n"));
        kv("command", &self.command);
        kv("version", env!("CARGO_PKG_VERSION"));
        kv("input_hash", &self.input_hash());
        kv("config_source", &self.config_source);
        kv(
            "config_file_sha256",
            self.config_file_sha256.as_deref().unwrap_or("none"),
        );
        kv("preset", self.preset.as_deref().unwrap_or("none"));
        kv(
            "seed",
            &self
                .seed
                .map_or_else(|| "none".to_string(), |s| s.to_string()),
        );
        kv("seed_mode", self.seed_mode);
        kv("threads", &self.threads);
        for line in self.resolved_config.lines() {
            out.push_str("config.");
            out.push_str(line);
            out.push('\n');
        }
        for (name, sum) in &self.artifacts {
            out.push_str(&format!("artifact.{name}.sha256 = {sum}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn render_lists_everything() {
        let m = Manifest {
            command: "fht".into(),
            config_source: "none".into(),
            config_file_sha256: None,
            preset: Some("noisy-sphereplus".into()),
            seed: Some(42),
            seed_mode: "fixed",
            threads: "auto".into(),
            resolved_config: "a = 1\nb = 2\n".into(),
            artifacts: vec![("fht.csv".into(), sha256_hex(b"x"))],
        };
        let text = m.render();
        assert!(text.contains("seed = 42\n"));
        assert!(text.contains("config.a = 1\n"));
        assert!(text.contains("artifact.fht.csv.sha256 = "));
        assert!(text.contains(&format!("input_hash = {}", m.input_hash())));
    }
}
