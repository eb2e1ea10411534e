//! Plain-text reports: `key = value` lines with `#` notes.

use std::fmt::Display;

#[derive(Debug, Default, Clone)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new(title: &str) -> Self {
        Self {
            text: format!("# {title}\n"),
        }
    }

    pub fn kv(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.text.push_str(&format!("{key} = {value}\n"));
        self
    }

    pub fn opt(&mut self, key: &str, value: Option<impl Display>) -> &mut Self {
        match value {
            Some(v) => self.kv(key, v),
            None => self.kv(key, "none"),
        }
    }

    pub fn note(&mut self, text: &str) -> &mut Self {
        self.text.push_str(&format!("# {text}\n"));
        self
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}
