//! Run parameters shared by every computation and embedded in every output.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approximant::DEFAULT_TOL;
use crate::trace::{DEFAULT_ESCAPE_BOUND, DEFAULT_MAX_STEPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(ConfigError::BadValue { key: "format".into(), value: other.into() }),
        }
    }
}

impl fmt::Display for OutputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    #[serde(rename = "V")]
    pub coupling: f64,
    #[serde(rename = "k")]
    pub level: usize,
    pub tol: f64,
    pub max_steps: usize,
    pub escape_bound: f64,
    pub omega: f64,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            coupling: 1.0,
            level: 14,
            tol: DEFAULT_TOL,
            max_steps: DEFAULT_MAX_STEPS,
            escape_bound: DEFAULT_ESCAPE_BOUND,
            omega: 0.0,
            seed: 0,
            format: OutputFormat::Json,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError::BadValue { key: key.into(), value: value.trim().into() })
}

impl SpectralConfig {
    /// Sets one field by name. Accepts both the short keys used in outputs
    /// (`V`, `k`) and the long flag names (`coupling`, `level`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key.trim() {
            "V" | "coupling" => self.coupling = parse(key, value)?,
            "k" | "level" => self.level = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "max_steps" => self.max_steps = parse(key, value)?,
            "escape_bound" => self.escape_bound = parse(key, value)?,
            "omega" => self.omega = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "format" => self.format = value.parse()?,
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Applies a `key = value` file on top of `self`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn from_str_with_defaults(text: &str) -> Result<Self, ConfigError> {
        let mut c = SpectralConfig::default();
        c.apply_str(text)?;
        Ok(c)
    }

    /// `(key, value)` pairs in a fixed order, values formatted so that
    /// [`SpectralConfig::apply_str`] reads them back exactly.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("V", crate::io::fmt_f64(self.coupling)),
            ("k", self.level.to_string()),
            ("tol", crate::io::fmt_f64(self.tol)),
            ("max_steps", self.max_steps.to_string()),
            ("escape_bound", crate::io::fmt_f64(self.escape_bound)),
            ("omega", crate::io::fmt_f64(self.omega)),
            ("seed", self.seed.to_string()),
            ("format", self.format.to_string()),
        ]
    }

    pub fn to_key_value(&self) -> String {
        self.pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}
