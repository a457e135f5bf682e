use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::krylov::{build_hierarchy, solve_normal_equations, LevelHierarchy, LevelSpec, Method, SolveReport, SolverConfig};
use crate::sparse::FeatureMatrix;

/// Default number of timed solves per grid cell.
pub const DEFAULT_REPEATS: usize = 50;

/// A method with the hierarchy recipe it needs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub method: Method,
    #[serde(default)]
    pub levels: Vec<LevelSpec>,
}

impl MethodSpec {
    pub fn plain(method: Method) -> Self {
        Self { method, levels: Vec::new() }
    }

    pub fn with_levels(method: Method, levels: Vec<LevelSpec>) -> Self {
        Self { method, levels }
    }

    fn clustering_label(&self) -> String {
        if self.method.needs_hierarchy() {
            self.levels
                .iter()
                .map(|l| l.clustering.label())
                .collect::<Vec<_>>()
                .join(";")
        } else {
            "none".to_string()
        }
    }
}

/// One CSV row; column order is part of the output format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dataset: String,
    pub method: String,
    pub clustering: String,
    /// Coarse sizes from the first coarse level down, `;`-separated; empty without a hierarchy.
    #[serde(rename = "F_C")]
    pub f_c: String,
    pub beta: f64,
    pub tol: f64,
    pub iterations: usize,
    pub wall_time_s: f64,
    /// Mean CG time divided by this method's mean time, same `beta` and `tol`.
    pub speedup: f64,
}

/// Grid sweep settings.
#[derive(Clone, Debug)]
pub struct CompareOptions {
    pub n_repeats: usize,
    /// Template for every solve; `tol` is overwritten by the grid.
    pub config: SolverConfig,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            n_repeats: DEFAULT_REPEATS,
            config: SolverConfig::default(),
        }
    }
}

struct Timed {
    report: SolveReport,
    mean_time: f64,
}

fn timed_solve(
    x: &FeatureMatrix,
    beta: f64,
    rhs: &[f64],
    method: Method,
    config: &SolverConfig,
    hierarchy: Option<&LevelHierarchy<'_>>,
    n_repeats: usize,
) -> Result<Timed> {
    let mut total = 0.0;
    let mut first: Option<SolveReport> = None;
    for _ in 0..n_repeats.max(1) {
        let start = Instant::now();
        let (_, report) = solve_normal_equations(x, beta, rhs, method, config, hierarchy)?;
        total += start.elapsed().as_secs_f64();
        match &first {
            None => first = Some(report),
            Some(f) if f.iterations != report.iterations => {
                log::warn!("{method}: iteration count changed between repeats ({} vs {})", f.iterations, report.iterations);
            }
            _ => {}
        }
    }
    Ok(Timed {
        report: first.expect("at least one repeat"),
        mean_time: total / n_repeats.max(1) as f64,
    })
}

/// Times every method on every `(beta, tol)` cell against a CG baseline.
///
/// Hierarchies are built once per `(beta, method)` and excluded from timings.
/// Rows come out in grid order: `beta`, then `tol`, then CG followed by the
/// requested methods (CG is listed once even when requested).
pub fn compare_methods(
    dataset: &str,
    x: &FeatureMatrix,
    b: &[f64],
    beta_grid: &[f64],
    tol_grid: &[f64],
    methods: &[MethodSpec],
    options: &CompareOptions,
) -> Result<Vec<ComparisonRow>> {
    if beta_grid.is_empty() || tol_grid.is_empty() {
        return Err(Error::InvalidArgument("beta and tol grids must be non-empty".into()));
    }
    let rhs = x.spmv_transpose(b)?;
    let wrap = |method: &str, e: Error| Error::Experiment {
        dataset: dataset.to_string(),
        method: method.to_string(),
        source: Box::new(e),
    };
    let mut rows = Vec::new();
    for &beta in beta_grid {
        let mut hierarchies = Vec::with_capacity(methods.len());
        for spec in methods {
            hierarchies.push(if spec.method.needs_hierarchy() {
                Some(build_hierarchy(x, beta, &spec.levels, &options.config).map_err(|e| wrap(spec.method.name(), e))?)
            } else {
                None
            });
        }
        for &tol in tol_grid {
            let config = options.config.clone().with_tol(tol);
            let baseline = timed_solve(x, beta, &rhs, Method::Cg, &config, None, options.n_repeats)
                .map_err(|e| wrap("cg", e))?;
            rows.push(ComparisonRow {
                dataset: dataset.to_string(),
                method: "cg".into(),
                clustering: "none".into(),
                f_c: String::new(),
                beta,
                tol,
                iterations: baseline.report.iterations,
                wall_time_s: baseline.mean_time,
                speedup: 1.0,
            });
            for (spec, h) in methods.iter().zip(&hierarchies) {
                if spec.method == Method::Cg {
                    continue;
                }
                let t = timed_solve(x, beta, &rhs, spec.method, &config, h.as_ref(), options.n_repeats)
                    .map_err(|e| wrap(spec.method.name(), e))?;
                let f_c = h
                    .as_ref()
                    .map(|h| {
                        h.level_sizes()[1..]
                            .iter()
                            .map(|s| s.to_string())
                            .collect::<Vec<_>>()
                            .join(";")
                    })
                    .unwrap_or_default();
                rows.push(ComparisonRow {
                    dataset: dataset.to_string(),
                    method: spec.method.name().into(),
                    clustering: spec.clustering_label(),
                    f_c,
                    beta,
                    tol,
                    iterations: t.report.iterations,
                    wall_time_s: t.mean_time,
                    speedup: baseline.mean_time / t.mean_time,
                });
            }
        }
    }
    Ok(rows)
}
