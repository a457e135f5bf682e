//! `featmg` command-line interface.

mod commands;

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use featmg::clustering::{Bandwidth, ClusteringSpec, DistanceMeasure};
use featmg::krylov::Method;

#[derive(Parser, Debug)]
#[command(name = "featmg", version, about = "Clustering-based multilevel solvers for ridge normal equations")]
struct Cli {
    /// Seed for the right-hand side and every randomized clustering step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output file; its meaning depends on the subcommand.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one system `(X^T X + beta I) w = X^T b` and print the solve report as JSON.
    Solve(SolveArgs),
    /// Cluster the features, write the assignment CSV and print quality statistics.
    Cluster(ClusterArgs),
    /// Run a benchmark grid described by a TOML config.
    Bench(BenchArgs),
    /// Report the effective spectral radius of the two-level iteration matrix.
    Analyze(AnalyzeArgs),
    /// Generate a random ideal dataset (duplicated columns) as Matrix Market.
    Ideal(IdealArgs),
    /// List the benchmark matrices and where to obtain them.
    Datasets,
}

#[derive(Args, Debug)]
struct MatrixArgs {
    /// Matrix Market file, samples as rows.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, default_value_t = 1e-6)]
    beta: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Algorithm {
    /// Leader-follower with a fixed tolerance.
    Lf,
    /// Leader-follower with the tolerance searched to hit `--n-clusters`.
    LfTarget,
    Kmeans,
    Renyi,
}

#[derive(Args, Debug, Clone)]
struct ClusteringArgs {
    #[arg(long, value_enum, default_value = "lf-target")]
    clustering: Algorithm,
    /// Target number of clusters (all algorithms except `lf`).
    #[arg(long)]
    n_clusters: Option<usize>,
    /// Leader-follower distance tolerance (`lf` only).
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long, default_value = "euclidean")]
    distance: DistanceMeasure,
    /// Let leaders drift towards their followers' mean (`lf` only).
    #[arg(long)]
    update_leaders: bool,
    #[arg(long, default_value_t = 100)]
    kmeans_iters: usize,
    #[arg(long, default_value_t = 1000)]
    swaps: usize,
}

impl ClusteringArgs {
    fn spec(&self, n_clusters: Option<usize>, seed: u64) -> anyhow::Result<ClusteringSpec> {
        let need_k = || {
            n_clusters
                .or(self.n_clusters)
                .with_context(|| format!("--n-clusters is required for {:?} clustering", self.clustering))
        };
        Ok(match self.clustering {
            Algorithm::Lf => ClusteringSpec::LeaderFollower {
                tolerance: self.tolerance.context("--tolerance is required for lf clustering")?,
                distance: self.distance,
                update_leaders: self.update_leaders,
            },
            Algorithm::LfTarget => ClusteringSpec::LeaderFollowerTarget {
                n_clusters: need_k()?,
                distance: self.distance,
            },
            Algorithm::Kmeans => ClusteringSpec::KMeans {
                n_clusters: need_k()?,
                max_iters: self.kmeans_iters,
                seed,
            },
            Algorithm::Renyi => ClusteringSpec::Renyi {
                n_clusters: need_k()?,
                bandwidth: Bandwidth::default(),
                n_swaps: self.swaps,
                seed,
                distance: self.distance,
            },
        })
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    #[arg(long, default_value = "fcg_twolevel")]
    method: Method,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// FCG direction history length.
    #[arg(long, default_value_t = 20)]
    truncation: usize,
    /// Coarse sizes from finest to coarsest, e.g. `150,120`; overrides `--n-clusters`.
    #[arg(long, value_delimiter = ',')]
    levels: Vec<usize>,
    /// Tolerance of the inner FCG on middle levels.
    #[arg(long, default_value_t = 1e-6)]
    inner_tol: f64,
    #[command(flatten)]
    clustering: ClusteringArgs,
}

#[derive(Args, Debug)]
struct ClusterArgs {
    /// Matrix Market file, samples as rows.
    #[arg(long)]
    matrix: PathBuf,
    #[command(flatten)]
    clustering: ClusteringArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Experiment config (TOML).
    config: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    matrix: MatrixArgs,
    /// Smoothing weight; estimated from the largest eigenvalue when omitted.
    #[arg(long)]
    omega: Option<f64>,
    /// Include every eigenvalue magnitude in the report.
    #[arg(long)]
    full: bool,
    #[command(flatten)]
    clustering: ClusteringArgs,
}

#[derive(Args, Debug)]
struct IdealArgs {
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Number of distinct base columns (the ideal coarse size).
    #[arg(long, default_value_t = 10)]
    base: usize,
    /// Each base column is copied between 1 and this many times.
    #[arg(long, default_value_t = 4)]
    max_multiplicity: usize,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let ctx = commands::Context {
        seed: cli.seed,
        parallel: cli.threads != Some(1),
        output: cli.output,
    };
    match cli.command {
        Command::Solve(a) => commands::solve(&ctx, a),
        Command::Cluster(a) => commands::cluster(&ctx, a),
        Command::Bench(a) => commands::bench(&ctx, a),
        Command::Analyze(a) => commands::analyze(&ctx, a),
        Command::Ideal(a) => commands::ideal(&ctx, a),
        Command::Datasets => commands::datasets(),
    }
}
