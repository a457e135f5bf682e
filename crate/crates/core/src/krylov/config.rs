use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the Richardson smoothing weight is chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaMode {
    /// `omega = 2 / (beta + lambda_max(X^T X))`, with `lambda_max` from power iteration.
    #[default]
    Auto,
    Fixed(f64),
}

fn default_tol() -> f64 {
    1e-6
}

fn default_max_iters() -> usize {
    10_000
}

fn default_truncation() -> usize {
    20
}

/// Stopping rule and knobs shared by the Krylov solvers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Relative residual tolerance `||r|| / ||rhs||`.
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    /// FCG direction history length `m`.
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    #[serde(default)]
    pub omega_mode: OmegaMode,
    /// Seed of the power iteration start vector.
    #[serde(default)]
    pub rng_seed: u64,
    /// Use the rayon kernels for the fine-level operator.
    #[serde(default)]
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: default_tol(),
            max_iters: default_max_iters(),
            truncation: default_truncation(),
            omega_mode: OmegaMode::Auto,
            rng_seed: 0,
            parallel: false,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::config("tol", format!("must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters", "must be at least 1"));
        }
        if self.truncation == 0 {
            return Err(Error::config("truncation", "must be at least 1"));
        }
        if let OmegaMode::Fixed(w) = self.omega_mode {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::config("omega_mode", format!("fixed omega must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one solve.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    /// Relative residual norms; entry 0 is the initial residual (1 for `x0 = 0`).
    pub residual_history: Vec<f64>,
    pub converged: bool,
    /// Seconds.
    pub wall_time: f64,
    /// Inner iterations spent inside the preconditioner, one entry per outer iteration.
    pub inner_iteration_counts: Vec<usize>,
}

impl SolveReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}
