use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use crate::analysis::{compare_methods, CompareOptions, ComparisonRow};
use crate::error::{Error, Result};
use crate::io::{generate_rhs, read_matrix_market, RhsSpec, RHS_GENERATOR};

/// Files written by [`run`] and the rows they contain.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub rows: Vec<ComparisonRow>,
    pub csv_path: PathBuf,
    pub config_echo_path: PathBuf,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    config: &'a ExperimentConfig,
    dataset_name: String,
    n_samples: usize,
    n_features: usize,
    nnz: usize,
    rhs_generator: &'static str,
    crate_version: &'static str,
}

/// `<output stem>.config.json` next to the CSV.
pub fn config_echo_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "results".into());
    output.with_file_name(format!("{stem}.config.json"))
}

/// Writes rows with the fixed column order `dataset, method, clustering, F_C, beta, tol, iterations, wall_time_s, speedup`.
pub fn write_rows_csv(path: &Path, rows: &[ComparisonRow]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["dataset", "method", "clustering", "F_C", "beta", "tol", "iterations", "wall_time_s", "speedup"])?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Loads the dataset, sweeps the grid and writes the CSV plus a JSON echo of the config.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let name = config.dataset_name();
    let x = read_matrix_market(&config.dataset)?;
    let (b, _) = generate_rhs(&x, &RhsSpec::new(config.rhs_seed))?;
    let options = CompareOptions {
        n_repeats: config.n_repeats,
        config: config.solver.clone(),
    };
    let rows = compare_methods(
        &name,
        &x,
        &b,
        &config.beta_grid,
        &config.tol_grid,
        &config.resolved_methods(),
        &options,
    )?;
    for row in &rows {
        log::info!(
            "{} {} beta={:e} tol={:e}: {} iterations, {:.3e} s, speed-up {:.2}",
            row.dataset,
            row.method,
            row.beta,
            row.tol,
            row.iterations,
            row.wall_time_s,
            row.speedup
        );
    }
    write_rows_csv(&config.output, &rows)?;
    let echo_path = config_echo_path(&config.output);
    let echo = ConfigEcho {
        config,
        dataset_name: name,
        n_samples: x.n_samples(),
        n_features: x.n_features(),
        nnz: x.nnz(),
        rhs_generator: RHS_GENERATOR,
        crate_version: env!("CARGO_PKG_VERSION"),
    };
    let file = std::fs::File::create(&echo_path).map_err(|e| Error::io(&echo_path, e))?;
    serde_json::to_writer_pretty(file, &echo)?;
    Ok(RunOutcome {
        rows,
        csv_path: config.output.clone(),
        config_echo_path: echo_path,
    })
}
