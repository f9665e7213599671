//! Run configuration from flags and an optional JSON file.
//!
//! Precedence, lowest first: built-in parameter defaults, the JSON file,
//! command-line flags. `--param` entries override file parameters key by
//! key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::models::Model;
use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Contents of a `--config` file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<Model>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Values given on the command line.
#[derive(Debug, Default, Clone)]
pub struct FlagConfig {
    pub model: Option<Model>,
    pub params: Vec<String>,
    pub t_start: Option<f64>,
    pub t_end: Option<f64>,
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// A validated run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    /// Every parameter of the model, defaults filled in.
    pub params: BTreeMap<String, f64>,
    pub t_start: f64,
    pub t_end: f64,
    pub n_steps: usize,
    pub out: PathBuf,
    pub format: Format,
}

/// Parses `key=value`.
pub fn parse_param(entry: &str) -> CliResult<(String, f64)> {
    let (key, value) = entry
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("parameter `{entry}` is not of the form key=value")))?;
    let key = key.trim();
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("parameter `{key}`: `{}` is not a number", value.trim())))?;
    if !value.is_finite() {
        return Err(CliError::Config(format!("parameter `{key}` must be finite")));
    }
    Ok((key.to_string(), value))
}

impl RunConfig {
    pub fn resolve(flags: &FlagConfig, file: Option<FileConfig>) -> CliResult<Self> {
        let file = file.unwrap_or_default();
        let model = flags.model.or(file.model).ok_or_else(|| CliError::Config("missing `model`".into()))?;
        let mut given = file.params;
        for entry in &flags.params {
            let (k, v) = parse_param(entry)?;
            given.insert(k, v);
        }
        let params = model.resolve_params(&given)?;
        let t_start = flags.t_start.or(file.t_start).unwrap_or(0.0);
        let t_end = flags.t_end.or(file.t_end).ok_or_else(|| CliError::Config("missing `t_end`".into()))?;
        let n_steps = flags.steps.or(file.steps).ok_or_else(|| CliError::Config("missing `steps`".into()))?;
        let out = flags.out.clone().or(file.out).ok_or_else(|| CliError::Config("missing `out`".into()))?;
        let format = flags.format.or(file.format).unwrap_or(Format::Csv);
        let config = Self { model, params, t_start, t_end, n_steps, out, format };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(CliError::Config("`t_start` and `t_end` must be finite".into()));
        }
        if !(self.t_end > self.t_start) {
            return Err(CliError::Config(format!("`t_end` ({}) must exceed `t_start` ({})", self.t_end, self.t_start)));
        }
        if self.t_start < 0.0 {
            return Err(CliError::Config(format!("`t_start` must be non-negative, got {}", self.t_start)));
        }
        if self.n_steps < 2 {
            return Err(CliError::Config(format!("`steps` must be at least 2, got {}", self.n_steps)));
        }
        Ok(())
    }

    pub fn param(&self, key: &str) -> f64 {
        self.params[key]
    }

    pub fn times(&self) -> Vec<f64> {
        adiabat::trace::linspace(self.t_start, self.t_end, self.n_steps)
    }

    /// SHA-256 over the model, the sorted parameters and the time grid.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.model.name().as_bytes());
        for (k, v) in &self.params {
            h.update(format!(";{k}={v:.16e}").as_bytes());
        }
        h.update(format!(";t={:.16e}..{:.16e}/{}", self.t_start, self.t_end, self.n_steps).as_bytes());
        hex::encode(h.finalize())
    }

    /// Same run with one parameter replaced.
    pub fn with_param(&self, key: &str, value: f64, out: PathBuf) -> CliResult<Self> {
        let mut given = self.params.clone();
        given.insert(key.to_string(), value);
        let params = self.model.resolve_params(&given)?;
        Ok(Self { params, out, ..self.clone() })
    }
}
