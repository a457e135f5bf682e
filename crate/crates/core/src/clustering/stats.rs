use serde::Serialize;

use super::assignment::{ClusterAssignment, Prototypes};
use super::distance::{Columns, DistanceMeasure};
use crate::error::{check_len, Result};
use crate::sparse::FeatureMatrix;

/// Member-to-prototype dissimilarity summary.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ClusterQuality {
    pub mean_sim: f64,
    pub max_sim: f64,
    /// 75% quantile, nearest-rank definition.
    pub q75: f64,
}

/// Distance from every non-prototype member to its cluster prototype, summarized.
///
/// With centroid prototypes every feature counts as a non-prototype member.
pub fn cluster_stats(
    x: &FeatureMatrix,
    assignment: &ClusterAssignment,
    distance: DistanceMeasure,
) -> Result<ClusterQuality> {
    check_len("cluster assignment", x.n_features(), assignment.n_features())?;
    let cols = Columns::new(x);
    let mut dists = Vec::new();
    match assignment.prototypes() {
        Prototypes::Features(protos) => {
            for (j, &c) in assignment.membership().iter().enumerate() {
                if protos[c] != j {
                    dists.push(distance.between(cols.col(j), cols.col(protos[c])));
                }
            }
        }
        Prototypes::Centroids(centroids) => {
            for (j, &c) in assignment.membership().iter().enumerate() {
                dists.push(distance.to_dense(cols.col(j), &centroids[c]));
            }
        }
    }
    Ok(summarize(dists))
}

pub(crate) fn summarize(mut dists: Vec<f64>) -> ClusterQuality {
    if dists.is_empty() {
        return ClusterQuality::default();
    }
    dists.sort_by(f64::total_cmp);
    let n = dists.len();
    let mean_sim = dists.iter().sum::<f64>() / n as f64;
    let rank = (0.75 * n as f64).ceil() as usize;
    ClusterQuality {
        mean_sim,
        max_sim: dists[n - 1],
        q75: dists[rank.max(1) - 1],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_features_one_cluster() {
        let x = FeatureMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let a = ClusterAssignment::new(vec![0, 0, 0], 1, Prototypes::Features(vec![0])).unwrap();
        assert_eq!(cluster_stats(&x, &a, DistanceMeasure::Euclidean).unwrap(), ClusterQuality::default());
    }

    #[test]
    fn singletons_are_zero() {
        let x = FeatureMatrix::identity(4);
        let a = ClusterAssignment::singletons(4);
        assert_eq!(cluster_stats(&x, &a, DistanceMeasure::Euclidean).unwrap(), ClusterQuality::default());
    }

    #[test]
    fn nearest_rank_quantile() {
        let q = summarize(vec![4.0, 1.0, 3.0, 2.0]);
        assert_eq!(q.q75, 3.0);
        assert_eq!(q.max_sim, 4.0);
        assert_eq!(q.mean_sim, 2.5);
        let q = summarize(vec![5.0]);
        assert_eq!((q.mean_sim, q.q75, q.max_sim), (5.0, 5.0, 5.0));
    }
}
