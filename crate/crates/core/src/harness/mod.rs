//! Experiment configuration and the grid runner behind the `bench` command.
//!
//! # Config format
//!
//! A TOML document with these keys (defaults in brackets):
//!
//! - `dataset`: Matrix Market file, relative to the config file
//! - `output`: CSV path, relative to the config file; a `<stem>.config.json` echo is written beside it
//! - `name` [file stem]: value of the `dataset` column
//! - `beta_grid`, `tol_grid`: non-empty lists
//! - `n_repeats` [50]: timed solves per cell
//! - `rhs_seed` [0]: seed of the standard normal `b`
//! - `[solver]`: `tol`, `max_iters` [10000], `truncation` [20], `omega_mode` [`"auto"` or `{ fixed = w }`], `rng_seed`, `parallel`
//! - `[[levels]]`: default hierarchy, one table per coarse level with
//!   `clustering` (`algorithm` = `leader_follower` | `leader_follower_target` | `kmeans` | `renyi`),
//!   `interpolation` (`kind` = `adjusted_average` | `plain_average` | `least_squares`),
//!   `coarse_solver` (`kind` = `direct_cholesky` | `inner_cg` | `inner_fcg`) and optional `beta`
//! - `[[methods]]`: `method` = `cg` | `jacobi_cg` | `fcg_twolevel` | `fcg_multilevel` | `fgmres_twolevel`,
//!   optionally with its own `levels`

mod config;
mod run;

pub use config::ExperimentConfig;
pub use run::{config_echo_path, run, write_rows_csv, RunOutcome};
