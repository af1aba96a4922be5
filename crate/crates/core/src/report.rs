//! Human-readable `key = value` report files.
//!
//! Each file starts with the version line, then the entries, then the fully
//! resolved configuration as `#`-prefixed TOML so the file stays parseable
//! line by line.

use std::fmt::Display;
use std::path::Path;

use crate::config::SimConfig;
use crate::error::Result;
use crate::VERSION;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    kind: String,
    entries: Vec<(String, String)>,
    config: Option<String>,
}

impl Report {
    pub fn new(kind: &str) -> Self {
        Report {
            kind: kind.to_string(),
            ..Default::default()
        }
    }

    pub fn with_config(mut self, config: &SimConfig) -> Self {
        self.config = Some(config.to_toml());
        self
    }

    /// Arbitrary text in place of a [`SimConfig`], for subcommands driven by flags.
    pub fn with_config_text(mut self, text: String) -> Self {
        self.config = Some(text);
        self
    }

    pub fn push(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.entries.push((key.to_string(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        let mut s = format!("# {VERSION}\nreport = {}\nversion = {VERSION}\n", self.kind);
        for (k, v) in &self.entries {
            s.push_str(&format!("{k} = {v}\n"));
        }
        if let Some(cfg) = &self.config {
            s.push_str("# resolved config\n");
            for line in cfg.lines() {
                s.push_str("# ");
                s.push_str(line);
                s.push('\n');
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render())?;
        Ok(())
    }
}

/// Shortest round-trip formatting, used for every float in reports and CSVs.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}
