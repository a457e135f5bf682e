use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use featmg::analysis::{effective_spectral_radius, random_ideal_dataset};
use featmg::clustering::{cluster_stats, ClusterAssignment};
use featmg::coarsening::build_adjusted_average;
use featmg::harness::{run, ExperimentConfig};
use featmg::io::{generate_rhs, read_matrix_market, write_matrix_market, MmField, MmSymmetry, RhsSpec, DATASETS};
use featmg::krylov::{
    build_hierarchy, smoothing_weight, solve_system, CoarseSolverSpec, LevelSpec, OmegaMode, SolverConfig,
};
use featmg::FeatureMatrix;
use serde_json::json;

use crate::{AnalyzeArgs, BenchArgs, ClusterArgs, IdealArgs, SolveArgs};

pub struct Context {
    pub seed: u64,
    pub parallel: bool,
    pub output: Option<PathBuf>,
}

fn load(path: &Path) -> anyhow::Result<FeatureMatrix> {
    read_matrix_market(path).with_context(|| format!("reading {}", path.display()))
}

fn print_json(value: &serde_json::Value) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// `feature_id,cluster_id`, one row per feature.
fn write_assignment_csv(path: &Path, a: &ClusterAssignment) -> anyhow::Result<()> {
    let mut w = create(path)?;
    writeln!(w, "feature_id,cluster_id")?;
    for (j, c) in a.membership().iter().enumerate() {
        writeln!(w, "{j},{c}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn solve(ctx: &Context, args: SolveArgs) -> anyhow::Result<()> {
    let x = load(&args.matrix.matrix)?;
    let beta = args.matrix.beta;
    let mut config = SolverConfig::default().with_tol(args.tol).with_max_iters(args.max_iters);
    config.truncation = args.truncation;
    config.rng_seed = ctx.seed;
    config.parallel = ctx.parallel;
    config.validate()?;

    let hierarchy = if args.method.needs_hierarchy() {
        let sizes: Vec<Option<usize>> = if args.levels.is_empty() {
            vec![None]
        } else {
            args.levels.iter().map(|&s| Some(s)).collect()
        };
        let last = sizes.len() - 1;
        let specs = sizes
            .iter()
            .enumerate()
            .map(|(i, &size)| {
                let spec = LevelSpec::new(args.clustering.spec(size, ctx.seed)?);
                Ok(if i < last {
                    spec.with_coarse_solver(CoarseSolverSpec::InnerFcg {
                        tol: args.inner_tol,
                        max_iters: 1000,
                    })
                } else {
                    spec
                })
            })
            .collect::<anyhow::Result<Vec<_>>>()?;
        Some(build_hierarchy(&x, beta, &specs, &config).context("building the level hierarchy")?)
    } else {
        None
    };

    let (b, _) = generate_rhs(&x, &RhsSpec::new(ctx.seed))?;
    let (w, report) = solve_system(&x, beta, &b, args.method, &config, hierarchy.as_ref())
        .with_context(|| format!("solving with {}", args.method))?;
    if let Some(path) = &ctx.output {
        let mut out = create(path)?;
        for v in &w {
            writeln!(out, "{v:e}")?;
        }
        out.flush()?;
    }
    print_json(&json!({
        "method": args.method.name(),
        "level_sizes": hierarchy.as_ref().map(|h| h.level_sizes()),
        "beta": beta,
        "tol": args.tol,
        "rhs_seed": ctx.seed,
        "report": report,
    }))?;
    if !report.converged {
        bail!("{} did not converge in {} iterations", args.method, report.iterations);
    }
    Ok(())
}

pub fn cluster(ctx: &Context, args: ClusterArgs) -> anyhow::Result<()> {
    let x = load(&args.matrix)?;
    let spec = args.clustering.spec(None, ctx.seed)?;
    let a = spec.run(&x).context("clustering")?;
    let quality = cluster_stats(&x, &a, spec.distance())?;
    let path = ctx.output.clone().unwrap_or_else(|| PathBuf::from("assignment.csv"));
    write_assignment_csv(&path, &a)?;
    print_json(&json!({
        "clustering": spec,
        "n_features": x.n_features(),
        "n_clusters": a.n_clusters(),
        "assignment_csv": path,
        "quality": quality,
    }))
}

pub fn bench(ctx: &Context, args: BenchArgs) -> anyhow::Result<()> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(out) = &ctx.output {
        config.output = out.clone();
    }
    if ctx.parallel {
        config.solver.parallel = true;
    }
    let outcome = run(&config).with_context(|| format!("running {}", args.config.display()))?;
    for row in &outcome.rows {
        println!(
            "{:<12} {:<16} {:<4} beta={:<8e} tol={:<8e} iterations={:<6} time={:.3e}s speedup={:.2}",
            row.dataset, row.method, row.clustering, row.beta, row.tol, row.iterations, row.wall_time_s, row.speedup
        );
    }
    println!("wrote {}", outcome.csv_path.display());
    println!("wrote {}", outcome.config_echo_path.display());
    Ok(())
}

pub fn analyze(ctx: &Context, args: AnalyzeArgs) -> anyhow::Result<()> {
    let x = load(&args.matrix.matrix)?;
    let beta = args.matrix.beta;
    let spec = args.clustering.spec(None, ctx.seed)?;
    let a = spec.run(&x).context("clustering")?;
    let p = build_adjusted_average(&a)?;
    let mode = args.omega.map_or(OmegaMode::Auto, OmegaMode::Fixed);
    let omega = smoothing_weight(&x, beta, mode, ctx.seed)?;
    let report = effective_spectral_radius(&x, beta, &p, omega)?;
    let spectral_radius = report.eigenvalue_magnitudes.last().copied().unwrap_or(0.0);
    let mut value = json!({
        "clustering": spec,
        "n_features": report.fine_dim,
        "n_clusters": report.f_c,
        "beta": beta,
        "omega": omega,
        "rho_eff": report.rho_eff,
        "spectral_radius": spectral_radius,
    });
    if args.full {
        value["eigenvalue_magnitudes"] = json!(report.eigenvalue_magnitudes);
    }
    print_json(&value)
}

pub fn ideal(ctx: &Context, args: IdealArgs) -> anyhow::Result<()> {
    let d = random_ideal_dataset(args.samples, args.base, args.max_multiplicity, ctx.seed)?;
    let path = ctx.output.clone().unwrap_or_else(|| PathBuf::from("ideal.mtx"));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_matrix_market(&path, &d.matrix, MmField::Real, MmSymmetry::General)?;
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "ideal".into());
    let assignment_path = path.with_file_name(format!("{stem}.assignment.csv"));
    write_assignment_csv(&assignment_path, &d.assignment)?;
    print_json(&json!({
        "matrix": path,
        "assignment_csv": assignment_path,
        "n_samples": d.matrix.n_samples(),
        "n_features": d.matrix.n_features(),
        "n_clusters": d.assignment.n_clusters(),
        "multiplicities": d.multiplicities,
    }))
}

pub fn datasets() -> anyhow::Result<()> {
    println!("Matrices are read from local Matrix Market files; nothing is downloaded.");
    println!("Place them in $FEATMG_DATA_DIR (default ./data).\n");
    for d in DATASETS {
        println!(
            "{:<10} {:>5} x {:<6} nnz {:<9} {}\n{:<10} {}",
            d.name, d.shape.0, d.shape.1, d.nnz, d.source, "", d.note
        );
    }
    Ok(())
}
