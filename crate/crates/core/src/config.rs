//! Resource limits and run settings.
//!
//! Settings come from defaults, then an optional `key=value` file, then the
//! `GRIDTHETA_MAX_K` environment variable.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENV_MAX_K: &str = "GRIDTHETA_MAX_K";

/// Grid-size caps for the expensive computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Full homology and whole-complex matrices.
    pub max_k_homology: usize,
    /// Single-bucket boundary membership.
    pub max_k_boundary: usize,
    /// Minus differential with monomial coefficients.
    pub max_k_minus: usize,
    /// Largest grading bucket handed to elimination.
    pub max_bucket: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_k_homology: 10,
            max_k_boundary: 12,
            max_k_minus: 5,
            max_bucket: 4_000_000,
        }
    }
}

impl Limits {
    /// Same caps with every limit lowered to at most `k`.
    pub fn capped_at(self, k: usize) -> Self {
        Limits {
            max_k_homology: self.max_k_homology.min(k),
            max_k_boundary: self.max_k_boundary.min(k),
            max_k_minus: self.max_k_minus.min(k),
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Table,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "table" => Ok(OutputFormat::Table),
            other => Err(Error::Parse(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    pub limits: Limits,
    /// Wall-clock budget in seconds for batch commands.
    pub time_budget_secs: Option<u64>,
    pub threads: Option<usize>,
    pub format: OutputFormat,
    pub seed: u64,
    /// Corrupts the tilde differential inside the report, for negative controls.
    pub tamper_differential: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limits: Limits::default(),
            time_budget_secs: None,
            threads: None,
            format: OutputFormat::Json,
            seed: 0x5eed,
            tamper_differential: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Parse(format!("bad value `{value}` for `{key}`")))
}

fn parse_positive(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse_num(key, value)?;
    if v == 0 {
        return Err(Error::Parse(format!("`{key}` must be positive")));
    }
    Ok(v)
}

impl RunConfig {
    /// Applies `key=value` lines; `#` starts a comment.
    pub fn apply_str(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "max_k" => {
                let k = parse_positive(key, value)?;
                self.limits.max_k_homology = k;
                self.limits.max_k_boundary = self.limits.max_k_boundary.max(k);
            }
            "max_k_homology" => self.limits.max_k_homology = parse_positive(key, value)?,
            "max_k_boundary" => self.limits.max_k_boundary = parse_positive(key, value)?,
            "max_k_minus" => self.limits.max_k_minus = parse_positive(key, value)?,
            "max_bucket" => self.limits.max_bucket = parse_positive(key, value)?,
            "time_budget" => self.time_budget_secs = Some(parse_positive(key, value)? as u64),
            "threads" => self.threads = Some(parse_positive(key, value)?),
            "format" => self.format = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "tamper_differential" => self.tamper_differential = parse_num(key, value)?,
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = RunConfig::default();
        cfg.apply_str(&text)?;
        Ok(cfg)
    }

    /// `GRIDTHETA_MAX_K` caps every limit when set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(ENV_MAX_K) {
            let k = parse_positive(ENV_MAX_K, &v)?;
            self.limits = Limits {
                max_k_homology: k,
                max_k_boundary: k,
                max_k_minus: self.limits.max_k_minus.min(k),
                ..self.limits
            };
        }
        Ok(())
    }
}
