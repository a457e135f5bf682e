//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (no libtest harness) so the report is always
//! printed; exits non-zero when any criterion fails.

mod common;

use std::time::Instant;

use featmg::analysis::{compare_methods, effective_spectral_radius, random_ideal_dataset, CompareOptions, MethodSpec};
use featmg::clustering::{
    cluster_stats, leader_follower, min_nonzero_pairwise_distance, renyi_entropy, renyi_subsample, Bandwidth,
    ClusterAssignment, ClusteringSpec, DistanceMeasure,
};
use featmg::coarsening::{build_adjusted_average, coarsen, ls_rows, top_eigenpairs, LsVariant};
use featmg::io::{generate_rhs, RhsSpec};
use featmg::krylov::{
    build_hierarchy, cg, fcg, smoothing_weight, solve_system, CoarseSolverSpec, IdentityPreconditioner, LevelHierarchy,
    LevelSpec, Method, OmegaMode, SolverConfig,
};
use featmg::{FeatureMatrix, LinearOperator, RidgeOperator};
use nalgebra::{DMatrix, DVector};

use common::*;

const LPSC105: &str = "lpsc105.mtx";
const TREK10: &str = "trek10.mtx";
const CNAE: &str = "cnae.mtx";
const BETA: f64 = 1e-6;
const TOL: f64 = 1e-6;
const RHS_SEED: u64 = 0;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn lf_target(n: usize) -> ClusteringSpec {
    ClusteringSpec::LeaderFollowerTarget {
        n_clusters: n,
        distance: DistanceMeasure::Euclidean,
    }
}

fn config() -> SolverConfig {
    SolverConfig::default().with_tol(TOL)
}

/// Two-level FCG iterations and coarse size for one clustering.
fn two_level_fcg(x: &FeatureMatrix, b: &[f64], clustering: ClusteringSpec) -> Result<(usize, usize, bool), String> {
    let cfg = config();
    let h = build_hierarchy(x, BETA, &[LevelSpec::new(clustering)], &cfg).map_err(e2s)?;
    let (_, rep) = solve_system(x, BETA, b, Method::FcgTwoLevel, &cfg, Some(&h)).map_err(e2s)?;
    Ok((rep.iterations, h.level_sizes()[1], rep.converged))
}

fn cg_iterations(x: &FeatureMatrix, b: &[f64]) -> Result<(usize, bool), String> {
    let (_, rep) = solve_system(x, BETA, b, Method::Cg, &config(), None).map_err(e2s)?;
    Ok((rep.iterations, rep.converged))
}

struct IdealInstance {
    x: FeatureMatrix,
    assignment: ClusterAssignment,
    beta: f64,
    seed: u64,
}

fn ideal_instances() -> Vec<IdealInstance> {
    (0..50u64)
        .map(|k| {
            let n_base = 2 + (k as usize * 7) % 39; // 2..=40
            let max_mult = (200 / n_base).min(6);
            let d = random_ideal_dataset(60, n_base, max_mult, 1000 + k).unwrap();
            IdealInstance {
                x: d.matrix,
                assignment: d.assignment,
                beta: if k % 2 == 0 { 1e-6 } else { 1e-2 },
                seed: k,
            }
        })
        .collect()
}

fn criterion_1() -> Outcome {
    let mut worst_eig = 0.0f64;
    let mut max_res = 0.0f64;
    for inst in ideal_instances() {
        let f = inst.x.n_features();
        let fc = inst.assignment.n_clusters();
        ensure(f <= 200 && fc <= 40, || format!("instance {} too large", inst.seed))?;
        // the clustering must be found, not just given
        let found = leader_follower(&inst.x, 1e-8, DistanceMeasure::Euclidean, false).map_err(e2s)?;
        ensure(same_partition(found.membership(), inst.assignment.membership()), || {
            format!("instance {}: leader-follower did not recover the duplicate groups", inst.seed)
        })?;
        let p = build_adjusted_average(&found).map_err(e2s)?;
        let level = coarsen(&inst.x, &p, inst.beta).map_err(e2s)?;

        let fine = sym_eigenvalues_desc(dense_ridge(&inst.x, 0.0));
        let coarse = sym_eigenvalues_desc(level.coarse_matrix.gram_dense());
        for k in 0..fc {
            let rel = (fine[k] - coarse[k]).abs() / fine[k].abs();
            worst_eig = worst_eig.max(rel);
        }
        ensure(worst_eig <= 1e-8, || format!("instance {}: eigenvalue mismatch {worst_eig:e}", inst.seed))?;

        let omega = smoothing_weight(&inst.x, inst.beta, OmegaMode::Auto, 0).map_err(e2s)?;
        let h = LevelHierarchy::two_level(&inst.x, inst.beta, level, omega, CoarseSolverSpec::DirectCholesky).map_err(e2s)?;
        let b = featmg::io::standard_normal(inst.seed, inst.x.n_samples());
        let cfg = SolverConfig::default().with_tol(1e-10);
        let (_, rep) = solve_system(&inst.x, inst.beta, &b, Method::FcgTwoLevel, &cfg, Some(&h)).map_err(e2s)?;
        max_res = max_res.max(rep.final_residual());
        ensure(rep.converged && rep.iterations == 1, || {
            format!(
                "instance {}: FCG took {} iterations (residual {:e})",
                inst.seed,
                rep.iterations,
                rep.final_residual()
            )
        })?;
    }
    Ok(format!(
        "50 instances; max relative eigenvalue gap {worst_eig:.1e}; FCG 1 iteration each, max residual {max_res:.1e}"
    ))
}

fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    for inst in ideal_instances() {
        let p = build_adjusted_average(&inst.assignment).map_err(e2s)?;
        let omega = smoothing_weight(&inst.x, inst.beta, OmegaMode::Auto, 0).map_err(e2s)?;
        let rep = effective_spectral_radius(&inst.x, inst.beta, &p, omega).map_err(e2s)?;
        worst = worst.max(rep.rho_eff);
        ensure(rep.rho_eff <= 1e-8, || format!("instance {}: rho_eff {:e}", inst.seed, rep.rho_eff))?;
    }
    let x = random_sparse(30, 25, 0.3, 5);
    let p = build_adjusted_average(&ClusterAssignment::singletons(25)).map_err(e2s)?;
    let omega = smoothing_weight(&x, 1e-2, OmegaMode::Auto, 0).map_err(e2s)?;
    let single = effective_spectral_radius(&x, 1e-2, &p, omega).map_err(e2s)?.rho_eff;
    ensure(single <= 1e-12, || format!("singleton clusters: rho_eff {single:e}"))?;
    Ok(format!("max rho_eff over ideal instances {worst:.1e}; singleton clustering {single:.1e}"))
}

fn criterion_3() -> Outcome {
    let x = load_dataset(LPSC105)?;
    ensure((x.n_samples(), x.n_features(), x.nnz()) == (105, 163, 340), || "unexpected lpsc105 shape".into())?;
    let (b, _) = generate_rhs(&x, &RhsSpec::new(RHS_SEED)).map_err(e2s)?;
    let (cg_it, cg_ok) = cg_iterations(&x, &b)?;
    let (it56, fc56, ok56) = two_level_fcg(&x, &b, lf_target(56))?;
    let (it134, fc134, ok134) = two_level_fcg(&x, &b, lf_target(134))?;
    let msg = format!("CG {cg_it} (66 +- 10); LF F_C={fc56}: FCG {it56} (<= 40); LF F_C={fc134}: FCG {it134} (<= 3)");
    ensure(cg_ok && (56..=76).contains(&cg_it), || msg.clone())?;
    ensure(fc56 == 56 && ok56 && it56 <= 40, || msg.clone())?;
    ensure(fc134 == 134 && ok134 && it134 <= 3, || msg.clone())?;
    Ok(msg)
}

fn criterion_4() -> Outcome {
    let x = load_dataset(CNAE)?;
    let d = min_nonzero_pairwise_distance(&x, DistanceMeasure::Euclidean).ok_or("no distinct features")?;
    let a = leader_follower(&x, d / 2.0, DistanceMeasure::Euclidean, false).map_err(e2s)?;
    let stats = cluster_stats(&x, &a, DistanceMeasure::Euclidean).map_err(e2s)?;
    let (b, _) = generate_rhs(&x, &RhsSpec::new(RHS_SEED)).map_err(e2s)?;
    let cfg = config();
    let p = build_adjusted_average(&a).map_err(e2s)?;
    let level = coarsen(&x, &p, BETA).map_err(e2s)?;
    let omega = smoothing_weight(&x, BETA, OmegaMode::Auto, 0).map_err(e2s)?;
    let h = LevelHierarchy::two_level(&x, BETA, level, omega, CoarseSolverSpec::DirectCholesky).map_err(e2s)?;
    let (_, rep) = solve_system(&x, BETA, &b, Method::FcgTwoLevel, &cfg, Some(&h)).map_err(e2s)?;
    let msg = format!(
        "F_C {} (664), mean within-cluster distance {:.2}, FCG {} iterations (1)",
        a.n_clusters(),
        stats.mean_sim,
        rep.iterations
    );
    ensure(a.n_clusters() == 664 && stats.mean_sim == 0.0 && rep.converged && rep.iterations == 1, || msg.clone())?;
    Ok(msg)
}

fn criterion_5() -> Outcome {
    let x = load_dataset(TREK10)?;
    let (b, _) = generate_rhs(&x, &RhsSpec::new(RHS_SEED)).map_err(e2s)?;
    let (cg_it, cg_ok) = cg_iterations(&x, &b)?;
    let km = ClusteringSpec::KMeans {
        n_clusters: 150,
        max_iters: 100,
        seed: 0,
    };
    let (it, fc, ok) = two_level_fcg(&x, &b, km)?;
    let msg = format!("CG {cg_it} (248 +- 30); KM F_C={fc}: FCG {it} (<= 3)");
    ensure(cg_ok && (218..=278).contains(&cg_it) && ok && it <= 3, || msg.clone())?;
    Ok(msg)
}

fn criterion_6() -> Outcome {
    let x = load_dataset(TREK10)?;
    let (b, _) = generate_rhs(&x, &RhsSpec::new(RHS_SEED)).map_err(e2s)?;
    let cfg = config();
    let specs = [
        LevelSpec::new(lf_target(150)).with_coarse_solver(CoarseSolverSpec::InnerFcg { tol: 1e-6, max_iters: 1000 }),
        LevelSpec::new(lf_target(120)),
    ];
    let h = build_hierarchy(&x, BETA, &specs, &cfg).map_err(e2s)?;
    let (_, rep) = solve_system(&x, BETA, &b, Method::FcgMultilevel, &cfg, Some(&h)).map_err(e2s)?;
    let msg = format!(
        "levels {:?}; fine FCG {} (<= 3), middle iterations {:?}",
        h.level_sizes(),
        rep.iterations,
        rep.inner_iteration_counts
    );
    ensure(rep.converged && rep.iterations <= 3, || msg.clone())?;
    Ok(msg)
}

fn two_level_oracle(seed: u64) -> Result<f64, String> {
    let (n, f) = (40, 60 + (seed as usize % 5) * 28);
    let x = random_sparse(n, f, 0.2, seed);
    let beta = 1e-2;
    let fc = 10 + seed as usize % 7;
    let a = featmg::clustering::kmeans(&x, fc, 50, seed).map_err(e2s)?;
    let p = build_adjusted_average(&a).map_err(e2s)?;
    let omega = smoothing_weight(&x, beta, OmegaMode::Auto, seed).map_err(e2s)?;
    let h = LevelHierarchy::two_level(&x, beta, coarsen(&x, &p, beta).map_err(e2s)?, omega, CoarseSolverSpec::DirectCholesky)
        .map_err(e2s)?;
    let ad = dense_ridge(&x, beta);
    let pd = p.to_dense();
    let ac = pd.transpose() * &ad * &pd;
    let coarse = &pd * ac.try_inverse().ok_or("singular coarse operator")? * pd.transpose();
    let id = DMatrix::<f64>::identity(f, f);
    let minv = &id * omega + (&id - &ad * omega) * coarse;
    let r = random_vector(f, seed + 7);
    let mut z = vec![0.0; f];
    h.apply(&r, &mut z).map_err(e2s)?;
    let want: Vec<f64> = (&minv * DVector::from_column_slice(&r)).iter().copied().collect();
    Ok(rel_diff(&z, &want))
}

fn ls_oracle(seed: u64) -> Result<f64, String> {
    let x = random_sparse(30, 50, 0.3, seed);
    let beta = 1e-3;
    let a = leader_follower(&x, 1.6, DistanceMeasure::Euclidean, false).map_err(e2s)?;
    let protos = a.prototype_features().unwrap().to_vec();
    let basis = top_eigenpairs(&x, beta, 8, 8192).map_err(e2s)?;
    let diag = x.column_sq_norms();
    let mut worst = 0.0f64;
    for variant in [LsVariant::A, LsVariant::B] {
        let rows = ls_rows(&basis, &a, 2, variant, &x, beta, DistanceMeasure::Euclidean).map_err(e2s)?;
        for (i, row) in rows.iter().enumerate() {
            if protos.contains(&i) || row.fallback {
                continue;
            }
            // sqrt(eta)-weighted least squares by QR
            let k = basis.len();
            let c = row.clusters.len();
            let mut m = DMatrix::zeros(k, c);
            let mut t = DVector::zeros(k);
            for kk in 0..k {
                let w = basis.weights[kk].sqrt();
                for (jj, &cl) in row.clusters.iter().enumerate() {
                    m[(kk, jj)] = w * basis.vectors[(protos[cl], kk)];
                }
                let target = match variant {
                    LsVariant::A => basis.vectors[(i, kk)],
                    LsVariant::B => (1.0 - basis.values[kk] / (diag[i] + beta)) * basis.vectors[(i, kk)],
                };
                t[kk] = w * target;
            }
            let qr = m.qr();
            let qtb = qr.q().transpose() * t;
            let sol = qr.r().solve_upper_triangular(&qtb).ok_or("rank deficient oracle")?;
            let want: Vec<f64> = sol.iter().copied().collect();
            worst = worst.max(rel_diff(&row.weights, &want));
        }
    }
    Ok(worst)
}

fn criterion_7() -> Outcome {
    let mut apply_gap = 0.0f64;
    for seed in 0..5 {
        apply_gap = apply_gap.max(two_level_oracle(seed)?);
    }
    ensure(apply_gap <= 1e-10, || format!("two-level apply vs dense M^-1: {apply_gap:e}"))?;

    let mut ridge_gap = 0.0f64;
    for seed in 0..5 {
        let x = random_sparse(50, 40, 0.15, 100 + seed);
        let v = random_vector(40, seed);
        let op = RidgeOperator::new(&x, 0.3).unwrap();
        let got = op.apply(&v).map_err(e2s)?;
        let want: Vec<f64> = (dense_ridge(&x, 0.3) * DVector::from_column_slice(&v)).iter().copied().collect();
        ridge_gap = ridge_gap.max(rel_diff(&got, &want));
    }
    ensure(ridge_gap <= 1e-12, || format!("ridge apply vs dense Gram: {ridge_gap:e}"))?;

    let mut renyi_gap = 0.0f64;
    for seed in 0..5 {
        let x = random_sparse(20, 80, 0.3, 200 + seed);
        let bw = Bandwidth::default();
        let s = renyi_subsample(&x, 15, &bw, 500, seed, DistanceMeasure::Euclidean).map_err(e2s)?;
        let full = renyi_entropy(&x, &s.working_set, &bw).map_err(e2s)?;
        renyi_gap = renyi_gap.max((s.final_entropy() - full).abs() / full.abs().max(1.0));
    }
    ensure(renyi_gap <= 1e-10, || format!("Renyi incremental vs recompute: {renyi_gap:e}"))?;

    let mut ls_gap = 0.0f64;
    for seed in 0..5 {
        ls_gap = ls_gap.max(ls_oracle(300 + seed)?);
    }
    ensure(ls_gap <= 1e-10, || format!("least-squares rows vs QR oracle: {ls_gap:e}"))?;

    let mut solve_gap = 0.0f64;
    let tol = 1e-8;
    for seed in 0..5 {
        let x = random_sparse(60, 30, 0.3, 400 + seed);
        let beta = 1e-1;
        let b = random_vector(30, seed);
        let exact = dense_solve(&dense_ridge(&x, beta), &b);
        let op = RidgeOperator::new(&x, beta).unwrap();
        let cfg = SolverConfig::default().with_tol(tol);
        let (w1, _) = cg(&op, &b, &cfg, None).map_err(e2s)?;
        let (w2, _) = fcg(&op, &b, &cfg, &IdentityPreconditioner).map_err(e2s)?;
        let cond = {
            let e = sym_eigenvalues_desc(dense_ridge(&x, beta));
            e[0] / e[e.len() - 1]
        };
        // error bound scales with the conditioning of the instance
        let gap = rel_diff(&w1, &exact).max(rel_diff(&w2, &exact)) / cond.max(1.0);
        solve_gap = solve_gap.max(gap);
    }
    ensure(solve_gap <= 10.0 * tol, || format!("CG/FCG vs dense solve: {solve_gap:e}"))?;

    Ok(format!(
        "apply {apply_gap:.1e}, ridge {ridge_gap:.1e}, Renyi {renyi_gap:.1e}, LS rows {ls_gap:.1e}, CG/FCG {solve_gap:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut parts = Vec::new();
    let mut missing = Vec::new();
    let cases: [(&str, &str, ClusteringSpec); 3] = [
        ("lpsc105", LPSC105, lf_target(56)),
        (
            "CNAE",
            CNAE,
            ClusteringSpec::LeaderFollower {
                tolerance: 1e-8,
                distance: DistanceMeasure::Euclidean,
                update_leaders: false,
            },
        ),
        (
            "trek10",
            TREK10,
            ClusteringSpec::KMeans {
                n_clusters: 150,
                max_iters: 100,
                seed: 0,
            },
        ),
    ];
    for (name, file, clustering) in cases {
        let x = match load_dataset(file) {
            Ok(x) => x,
            Err(e) => {
                missing.push(e);
                continue;
            }
        };
        let (b, _) = generate_rhs(&x, &RhsSpec::new(RHS_SEED)).map_err(e2s)?;
        let methods = [
            MethodSpec::plain(Method::Cg),
            MethodSpec::with_levels(Method::FcgTwoLevel, vec![LevelSpec::new(clustering)]),
        ];
        let opts = CompareOptions {
            n_repeats: 3,
            config: config(),
        };
        let rows = compare_methods(name, &x, &b, &[BETA], &[TOL], &methods, &opts).map_err(e2s)?;
        let cg_row = &rows[0];
        let fcg_row = &rows[1];
        ensure(rows.iter().all(|r| r.speedup.is_finite() && r.speedup > 0.0), || format!("{name}: bad speed-up column"))?;
        ensure(fcg_row.iterations < cg_row.iterations, || {
            format!("{name}: FCG {} not below CG {}", fcg_row.iterations, cg_row.iterations)
        })?;
        parts.push(format!(
            "{name}: CG {} vs FCG {} (speed-up {:.2})",
            cg_row.iterations, fcg_row.iterations, fcg_row.speedup
        ));
    }
    if !missing.is_empty() {
        return Err(format!("{}; {}", parts.join("; "), missing.join("; ")));
    }
    Ok(parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("ideal-case exactness", criterion_1),
        ("range-annihilation effective spectral radius", criterion_2),
        ("lpsc105 iteration counts", criterion_3),
        ("CNAE perfect clustering", criterion_4),
        ("trek10 baseline and two-level", criterion_5),
        ("trek10 three-level recursion", criterion_6),
        ("oracle equivalence suite", criterion_7),
        ("speed-up columns and iteration trend", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}) [{secs:.1}s]: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
