use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analysis::{MethodSpec, DEFAULT_REPEATS};
use crate::error::{Error, Result};
use crate::krylov::{LevelSpec, Method, SolverConfig};

fn default_repeats() -> usize {
    DEFAULT_REPEATS
}

/// Declarative experiment, read from TOML.
///
/// Relative `dataset` and `output` paths are resolved against the directory
/// of the config file. `levels` is the hierarchy used by every preconditioned
/// method that does not list its own.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label for the `dataset` column; the file stem when absent.
    #[serde(default)]
    pub name: Option<String>,
    pub dataset: PathBuf,
    pub output: PathBuf,
    pub beta_grid: Vec<f64>,
    pub tol_grid: Vec<f64>,
    pub methods: Vec<MethodSpec>,
    #[serde(default)]
    pub levels: Vec<LevelSpec>,
    #[serde(default = "default_repeats")]
    pub n_repeats: usize,
    #[serde(default)]
    pub rhs_seed: u64,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_toml_str(&text, base)
    }

    /// Parses, resolves relative paths against `base_dir` and validates.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| toml_error(text, &e))?;
        if cfg.dataset.is_relative() {
            cfg.dataset = base_dir.join(&cfg.dataset);
        }
        if cfg.output.is_relative() {
            cfg.output = base_dir.join(&cfg.output);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dataset_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| {
            self.dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into())
        })
    }

    /// Methods with the default hierarchy filled in where needed.
    pub fn resolved_methods(&self) -> Vec<MethodSpec> {
        self.methods
            .iter()
            .map(|m| {
                if m.method.needs_hierarchy() && m.levels.is_empty() {
                    MethodSpec::with_levels(m.method, self.levels.clone())
                } else {
                    m.clone()
                }
            })
            .collect()
    }

    /// Checks every field without touching the dataset contents.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::config("methods", "at least one method is required"));
        }
        check_grid("beta_grid", &self.beta_grid, true)?;
        check_grid("tol_grid", &self.tol_grid, false)?;
        if self.n_repeats == 0 {
            return Err(Error::config("n_repeats", "must be at least 1"));
        }
        self.solver.validate().map_err(|e| match e {
            Error::Config { field, message } => Error::config(format!("solver.{field}"), message),
            other => other,
        })?;
        for (i, m) in self.resolved_methods().iter().enumerate() {
            let field = format!("methods[{i}]");
            if !m.method.needs_hierarchy() {
                continue;
            }
            if m.levels.is_empty() {
                return Err(Error::config(
                    field,
                    format!("{} needs level specs (set `levels` or `methods.levels`)", m.method),
                ));
            }
            if matches!(m.method, Method::FcgTwoLevel | Method::FgmresTwoLevel) && m.levels.len() != 1 {
                return Err(Error::config(field, format!("{} takes exactly one level", m.method)));
            }
            for (l, spec) in m.levels.iter().enumerate() {
                if let Some(b) = spec.beta {
                    if !(b >= 0.0 && b.is_finite()) {
                        return Err(Error::config(format!("{field}.levels[{l}].beta"), format!("must be non-negative, got {b}")));
                    }
                }
            }
        }
        if !self.dataset.is_file() {
            return Err(Error::config(
                "dataset",
                format!("{} does not exist", self.dataset.display()),
            ));
        }
        Ok(())
    }
}

fn check_grid(name: &str, grid: &[f64], allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(name, "must not be empty"));
    }
    for &v in grid {
        let ok = v.is_finite() && if allow_zero { v >= 0.0 } else { v > 0.0 };
        if !ok {
            return Err(Error::config(name, format!("invalid entry {v}")));
        }
    }
    Ok(())
}

/// Maps a TOML error to a config error naming the offending key.
fn toml_error(text: &str, e: &toml::de::Error) -> Error {
    let message = e.message().to_string();
    for marker in ["missing field `", "unknown field `"] {
        if let Some(pos) = message.find(marker) {
            let rest = &message[pos + marker.len()..];
            if let Some(end) = rest.find('`') {
                return Error::config(&rest[..end], message.clone());
            }
        }
    }
    let field = e
        .span()
        .and_then(|span| {
            let start = text[..span.start.min(text.len())].rfind('\n').map_or(0, |p| p + 1);
            let line = text[start..].lines().next()?;
            Some(line.split('=').next()?.trim().to_string())
        })
        .filter(|f| !f.is_empty())
        .unwrap_or_else(|| "<document>".into());
    Error::config(field, message)
}
