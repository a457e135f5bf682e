//! Randomized invariants of the operators, prolongations and two-level method.

mod common;

use common::*;
use featmg::analysis::{effective_spectral_radius, make_ideal_dataset};
use featmg::clustering::{kmeans, leader_follower, ClusterAssignment, DistanceMeasure, Prototypes};
use featmg::coarsening::{build_adjusted_average, build_plain_average, coarsen};
use featmg::krylov::{smoothing_weight, solve_system, CoarseSolverSpec, LevelHierarchy, Method, OmegaMode, SolverConfig};
use featmg::{FeatureMatrix, LinearOperator, RidgeOperator};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn sparse_matrix() -> impl Strategy<Value = FeatureMatrix> {
    (2usize..25, 2usize..30, 0.05f64..0.6, any::<u64>()).prop_map(|(n, f, d, s)| random_sparse(n, f, d, s))
}

/// Random membership with every one of `k` clusters non-empty.
fn membership(f: usize, k: usize, seed: u64) -> ClusterAssignment {
    let mut m: Vec<usize> = (0..f).map(|j| if j < k { j } else { (seed as usize).wrapping_add(j * 31) % k }).collect();
    m.rotate_left(seed as usize % f);
    let mut protos = vec![usize::MAX; k];
    for (j, &c) in m.iter().enumerate() {
        if protos[c] == usize::MAX {
            protos[c] = j;
        }
    }
    ClusterAssignment::new(m, k, Prototypes::Features(protos)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ridge_operator_is_symmetric_and_coercive(x in sparse_matrix(), beta in 1e-6f64..10.0, s in any::<u64>()) {
        let f = x.n_features();
        let op = RidgeOperator::new(&x, beta).unwrap();
        let u = random_vector(f, s);
        let v = random_vector(f, s.wrapping_add(1));
        let au = op.apply(&u).unwrap();
        let av = op.apply(&v).unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let lhs = dot(&au, &v);
        let rhs = dot(&u, &av);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        prop_assert!(dot(&au, &u) >= beta * dot(&u, &u) * (1.0 - 1e-12));
    }

    #[test]
    fn adjusted_average_has_orthonormal_columns(f in 1usize..60, k_frac in 0.05f64..1.0, s in any::<u64>()) {
        let k = ((f as f64 * k_frac).ceil() as usize).clamp(1, f);
        let p = build_adjusted_average(&membership(f, k, s)).unwrap();
        let g = p.gram();
        prop_assert!((g - DMatrix::<f64>::identity(k, k)).amax() <= 1e-14);
    }

    #[test]
    fn plain_average_gram_is_cluster_sizes(f in 1usize..60, k_frac in 0.05f64..1.0, s in any::<u64>()) {
        let k = ((f as f64 * k_frac).ceil() as usize).clamp(1, f);
        let a = membership(f, k, s);
        let g = build_plain_average(&a).unwrap().gram();
        for c in 0..k {
            prop_assert!((g[(c, c)] - 1.0 / a.sizes()[c] as f64).abs() <= 1e-15);
        }
    }

    #[test]
    fn galerkin_operator_matches_dense_triple_product(x in sparse_matrix(), beta in 1e-4f64..1.0, s in any::<u64>(), plain in any::<bool>()) {
        let f = x.n_features();
        let k = 1 + (s as usize) % f;
        let a = membership(f, k, s);
        let p = if plain { build_plain_average(&a) } else { build_adjusted_average(&a) }.unwrap();
        let level = coarsen(&x, &p, beta).unwrap();
        let got = level.operator().unwrap().to_dense();
        let pd = p.to_dense();
        let want = pd.transpose() * dense_ridge(&x, beta) * &pd;
        prop_assert!((got - &want).amax() <= 1e-12 * (1.0 + want.amax()));
    }

    #[test]
    fn iteration_matrix_annihilates_coarse_range(x in sparse_matrix(), beta in 1e-4f64..1.0, s in any::<u64>()) {
        let f = x.n_features();
        let k = 1 + (s as usize) % f;
        let p = build_adjusted_average(&membership(f, k, s)).unwrap();
        let omega = smoothing_weight(&x, beta, OmegaMode::Auto, s).unwrap();
        let t = featmg::analysis::iteration_matrix(&x, beta, &p, omega).unwrap();
        let tp = &t * p.to_dense();
        prop_assert!(tp.amax() <= 1e-9 * (1.0 + t.amax()));
        let rep = effective_spectral_radius(&x, beta, &p, omega).unwrap();
        prop_assert!(rep.rho_eff <= 1e-8);
        // omega comes from a power-iteration estimate with relative tolerance 1e-4
        prop_assert!(rep.eigenvalue_magnitudes.last().copied().unwrap() <= 1.0 + 1e-3);
    }

    #[test]
    fn ideal_dataset_solves_in_one_iteration(
        n in 8usize..40,
        mult in proptest::collection::vec(1usize..5, 1..8),
        s in any::<u64>(),
        small_beta in any::<bool>(),
    ) {
        let fc = mult.len().min(n);
        let mult = &mult[..fc];
        let base = FeatureMatrix::from_dense(&DMatrix::from_fn(n, fc, |i, j| {
            let r = random_vector(n * fc, s);
            r[i * fc + j]
        }));
        let d = make_ideal_dataset(&base, mult, Some(s)).unwrap();
        let beta = if small_beta { 1e-6 } else { 1e-2 };

        let found = leader_follower(&d.matrix, 1e-10, DistanceMeasure::Euclidean, false).unwrap();
        prop_assert!(same_partition(found.membership(), d.assignment.membership()));

        let p = build_adjusted_average(&found).unwrap();
        let level = coarsen(&d.matrix, &p, beta).unwrap();
        let omega = smoothing_weight(&d.matrix, beta, OmegaMode::Auto, 0).unwrap();
        let h = LevelHierarchy::two_level(&d.matrix, beta, level, omega, CoarseSolverSpec::DirectCholesky).unwrap();
        let b = random_vector(n, s.wrapping_add(3));
        let cfg = SolverConfig::default().with_tol(1e-10);
        let (w, rep) = solve_system(&d.matrix, beta, &b, Method::FcgTwoLevel, &cfg, Some(&h)).unwrap();
        prop_assert!(rep.converged);
        prop_assert_eq!(rep.iterations, 1);
        let exact = dense_solve(&dense_ridge(&d.matrix, beta), &d.matrix.spmv_transpose(&b).unwrap());
        prop_assert!(rel_diff(&w, &exact) <= 1e-6);
    }

    #[test]
    fn kmeans_partition_is_valid(x in sparse_matrix(), s in any::<u64>()) {
        let f = x.n_features();
        let k = 1 + (s as usize) % f;
        let a = kmeans(&x, k, 30, s).unwrap();
        prop_assert_eq!(a.n_features(), f);
        prop_assert_eq!(a.n_clusters(), k);
        prop_assert!(a.sizes().iter().all(|&c| c > 0));
        prop_assert_eq!(a.sizes().iter().sum::<usize>(), f);
    }
}
