use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::eigen::EigenBasis;
use super::prolongation::{InterpolationKind, Prolongation};
use crate::clustering::{ClusterAssignment, Columns, DistanceMeasure};
use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

/// Target of the per-row least-squares fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsVariant {
    /// Fit `v_k(i)`.
    A,
    /// Fit `(1 - lambda_k / (||X(:,i)||^2 + beta)) v_k(i)`.
    B,
}

/// Relative pivot threshold below which a local normal-equation system counts as singular.
const SINGULAR_PIVOT: f64 = 1e-12;

/// Interpolation weights for one fine row.
#[derive(Clone, Debug, PartialEq)]
pub struct LsRow {
    /// Coarse cluster ids used for interpolation, nearest first.
    pub clusters: Vec<usize>,
    pub weights: Vec<f64>,
    /// True when the local system was singular and the adjusted-average row was used.
    pub fallback: bool,
}

/// Least-squares interpolation of the principal eigenvectors from the nearest prototypes.
///
/// For every non-prototype feature `i`, `C_i` holds the `n_interp` prototypes
/// closest under `distance` (lowest cluster id on ties) and the weights solve
/// `min_p sum_k eta_k (t_k(i) - sum_{j in C_i} p_j v_k(j))^2`. Prototype rows
/// interpolate themselves with weight 1.
pub fn build_ls_interpolation(
    basis: &EigenBasis,
    assignment: &ClusterAssignment,
    n_interp: usize,
    variant: LsVariant,
    x: &FeatureMatrix,
    beta: f64,
    distance: DistanceMeasure,
) -> Result<Prolongation> {
    let rows = ls_rows(basis, assignment, n_interp, variant, x, beta, distance)?;
    let kind = match variant {
        LsVariant::A => InterpolationKind::LeastSquaresA,
        LsVariant::B => InterpolationKind::LeastSquaresB,
    };
    let rows = rows
        .into_iter()
        .map(|r| r.clusters.into_iter().zip(r.weights).collect())
        .collect();
    Prolongation::from_rows(assignment.n_clusters(), rows, kind)
}

/// Per-row interpolation data behind [`build_ls_interpolation`].
pub fn ls_rows(
    basis: &EigenBasis,
    assignment: &ClusterAssignment,
    n_interp: usize,
    variant: LsVariant,
    x: &FeatureMatrix,
    beta: f64,
    distance: DistanceMeasure,
) -> Result<Vec<LsRow>> {
    let protos = assignment.prototype_features().ok_or(Error::CentroidPrototypes)?;
    let f = x.n_features();
    if assignment.n_features() != f || basis.vectors.nrows() != f {
        return Err(Error::DimensionMismatch {
            context: "least-squares interpolation",
            expected: f,
            actual: if assignment.n_features() != f {
                assignment.n_features()
            } else {
                basis.vectors.nrows()
            },
        });
    }
    if n_interp == 0 {
        return Err(Error::InvalidArgument("n_interp must be at least 1".into()));
    }
    if basis.is_empty() {
        return Err(Error::InvalidArgument("eigen basis is empty".into()));
    }
    let n_interp = n_interp.min(protos.len());
    let cols = Columns::new(x);
    let diag = x.column_sq_norms();
    let sizes = assignment.sizes();

    let mut is_proto = vec![false; f];
    protos.iter().for_each(|&p| is_proto[p] = true);

    let mut rows = Vec::with_capacity(f);
    for i in 0..f {
        if is_proto[i] {
            rows.push(LsRow {
                clusters: vec![assignment.cluster_of(i)],
                weights: vec![1.0],
                fallback: false,
            });
            continue;
        }
        let xi = cols.col(i);
        let mut ranked: Vec<(f64, usize)> = protos
            .iter()
            .enumerate()
            .map(|(c, &p)| (distance.between(xi, cols.col(p)), c))
            .collect();
        ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let clusters: Vec<usize> = ranked.iter().take(n_interp).map(|&(_, c)| c).collect();

        let targets: Vec<f64> = (0..basis.len())
            .map(|k| {
                let v = basis.vectors[(i, k)];
                match variant {
                    LsVariant::A => v,
                    LsVariant::B => (1.0 - basis.values[k] / (diag[i] + beta)) * v,
                }
            })
            .collect();

        match solve_weighted_normal_equations(basis, &clusters, protos, &targets) {
            Some(weights) => rows.push(LsRow {
                clusters,
                weights,
                fallback: false,
            }),
            None => {
                let own = assignment.cluster_of(i);
                rows.push(LsRow {
                    clusters: vec![own],
                    weights: vec![1.0 / (sizes[own] as f64).sqrt()],
                    fallback: true,
                });
            }
        }
    }
    Ok(rows)
}

/// Solves `(B^T W B) p = B^T W t` with `B[k, j] = v_k(proto_j)`, `W = diag(eta)`.
fn solve_weighted_normal_equations(
    basis: &EigenBasis,
    clusters: &[usize],
    protos: &[usize],
    targets: &[f64],
) -> Option<Vec<f64>> {
    let c = clusters.len();
    let mut g = DMatrix::zeros(c, c);
    let mut rhs = DVector::zeros(c);
    for k in 0..basis.len() {
        let eta = basis.weights[k];
        for a in 0..c {
            let va = basis.vectors[(protos[clusters[a]], k)];
            rhs[a] += eta * va * targets[k];
            for b in 0..c {
                g[(a, b)] += eta * va * basis.vectors[(protos[clusters[b]], k)];
            }
        }
    }
    let scale = (0..c).map(|a| g[(a, a)]).fold(0.0, f64::max);
    if !(scale > 0.0) {
        return None;
    }
    let chol = g.clone().cholesky()?;
    let l = chol.l();
    let min_pivot = (0..c).map(|a| l[(a, a)] * l[(a, a)]).fold(f64::INFINITY, f64::min);
    if min_pivot < SINGULAR_PIVOT * scale {
        return None;
    }
    let p = chol.solve(&rhs);
    p.iter().all(|v| v.is_finite()).then(|| p.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::Prototypes;

    #[test]
    fn single_vector_single_prototype_ratio() {
        // features 0 (leader) and 1 (follower)
        let x = FeatureMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 2.0), (1, 1, 1.0)]).unwrap();
        let a = ClusterAssignment::new(vec![0, 0], 1, Prototypes::Features(vec![0])).unwrap();
        let v = DMatrix::from_column_slice(2, 1, &[0.6, 0.8]);
        let basis = EigenBasis::from_vectors(&x, 1e-3, v).unwrap();
        let rows = ls_rows(&basis, &a, 1, LsVariant::A, &x, 1e-3, DistanceMeasure::Euclidean).unwrap();
        assert_eq!(rows[0].weights, vec![1.0]);
        assert!((rows[1].weights[0] - 0.8 / 0.6).abs() < 1e-14);
    }

    #[test]
    fn duplicate_of_leader_gets_unit_weight() {
        let x = FeatureMatrix::from_triplets(
            2,
            3,
            &[(0, 0, 1.0), (0, 1, 1.0), (1, 2, 3.0)],
        )
        .unwrap();
        // feature 1 duplicates leader 0
        let a = ClusterAssignment::new(vec![0, 0, 1], 2, Prototypes::Features(vec![0, 2])).unwrap();
        let basis = super::super::eigen::top_eigenpairs(&x, 1e-6, 2, 100).unwrap();
        let p = build_ls_interpolation(&basis, &a, 1, LsVariant::A, &x, 1e-6, DistanceMeasure::Euclidean).unwrap();
        let (cols, w) = p.row(1);
        assert_eq!(cols, &[0]);
        assert!((w[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_eigenvector_entries_fall_back() {
        let x = FeatureMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        let a = ClusterAssignment::new(vec![0, 0], 1, Prototypes::Features(vec![0])).unwrap();
        // v(leader) = 0 makes the local system singular
        let v = DMatrix::from_column_slice(2, 1, &[0.0, 1.0]);
        let basis = EigenBasis::from_vectors(&x, 0.0, v).unwrap();
        let rows = ls_rows(&basis, &a, 1, LsVariant::A, &x, 0.0, DistanceMeasure::Euclidean).unwrap();
        assert!(rows[1].fallback);
        assert!((rows[1].weights[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn centroid_prototypes_rejected() {
        let x = FeatureMatrix::identity(2);
        let a = ClusterAssignment::new(vec![0, 0], 1, Prototypes::Centroids(vec![vec![0.5, 0.5]])).unwrap();
        let basis = EigenBasis::from_vectors(&x, 0.0, DMatrix::from_column_slice(2, 1, &[1.0, 0.0])).unwrap();
        assert!(matches!(
            build_ls_interpolation(&basis, &a, 1, LsVariant::A, &x, 0.0, DistanceMeasure::Euclidean),
            Err(Error::CentroidPrototypes)
        ));
    }
}
