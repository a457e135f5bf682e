use super::assignment::{ClusterAssignment, Prototypes};
use super::distance::{Columns, DistanceMeasure, SparseCol};
use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

/// Owned sparse leader used when leaders are updated toward their followers.
struct MovingLeader {
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl MovingLeader {
    fn from_col(c: SparseCol<'_>) -> Self {
        Self {
            indices: c.indices.to_vec(),
            values: c.values.to_vec(),
        }
    }

    fn view(&self) -> SparseCol<'_> {
        SparseCol {
            indices: &self.indices,
            values: &self.values,
        }
    }

    /// `c += (x - c) / n`
    fn pull_toward(&mut self, x: SparseCol<'_>, n: usize) {
        let inv = 1.0 / n as f64;
        let mut indices = Vec::with_capacity(self.indices.len() + x.indices.len());
        let mut values = Vec::with_capacity(indices.capacity());
        let (mut i, mut j) = (0, 0);
        while i < self.indices.len() || j < x.indices.len() {
            let ia = self.indices.get(i).copied().unwrap_or(usize::MAX);
            let ib = x.indices.get(j).copied().unwrap_or(usize::MAX);
            let (idx, c, v) = if ia < ib {
                i += 1;
                (ia, self.values[i - 1], 0.0)
            } else if ib < ia {
                j += 1;
                (ib, 0.0, x.values[j - 1])
            } else {
                i += 1;
                j += 1;
                (ia, self.values[i - 1], x.values[j - 1])
            };
            let updated = c + (v - c) * inv;
            if updated != 0.0 {
                indices.push(idx);
                values.push(updated);
            }
        }
        self.indices = indices;
        self.values = values;
    }
}

/// Single sequential pass over the features in column order.
///
/// A feature joins the nearest leader (lowest cluster id on ties) when that
/// distance is strictly below `tolerance`; otherwise it founds a new cluster.
/// With `update_leaders` off the leaders stay original columns.
pub fn leader_follower(
    x: &FeatureMatrix,
    tolerance: f64,
    distance: DistanceMeasure,
    update_leaders: bool,
) -> Result<ClusterAssignment> {
    if !(tolerance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "leader-follower tolerance must be positive, got {tolerance}"
        )));
    }
    if x.n_features() == 0 {
        return Err(Error::InvalidArgument("feature matrix has no columns".into()));
    }
    let cols = Columns::new(x);
    leader_follower_on(&cols, tolerance, distance, update_leaders)
}

pub(crate) fn leader_follower_on(
    cols: &Columns,
    tolerance: f64,
    distance: DistanceMeasure,
    update_leaders: bool,
) -> Result<ClusterAssignment> {
    let f = cols.len();
    let mut membership = Vec::with_capacity(f);
    let mut leaders: Vec<usize> = Vec::new();
    let mut moving: Vec<MovingLeader> = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();

    for feature in 0..f {
        let xi = cols.col(feature);
        let mut best: Option<(usize, f64)> = None;
        for s in 0..leaders.len() {
            let leader = if update_leaders {
                moving[s].view()
            } else {
                cols.col(leaders[s])
            };
            let d = distance.between(xi, leader);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((s, d));
            }
        }
        match best {
            Some((s, d)) if d < tolerance => {
                membership.push(s);
                sizes[s] += 1;
                if update_leaders {
                    moving[s].pull_toward(xi, sizes[s]);
                }
            }
            _ => {
                membership.push(leaders.len());
                leaders.push(feature);
                sizes.push(1);
                if update_leaders {
                    moving.push(MovingLeader::from_col(xi));
                }
            }
        }
    }

    let n_clusters = leaders.len();
    let prototypes = if update_leaders {
        Prototypes::Centroids(
            moving
                .iter()
                .map(|m| {
                    let mut dense = vec![0.0; cols.dim()];
                    for (&i, &v) in m.indices.iter().zip(&m.values) {
                        dense[i] = v;
                    }
                    dense
                })
                .collect(),
        )
    } else {
        Prototypes::Features(leaders)
    };
    ClusterAssignment::new(membership, n_clusters, prototypes)
}

/// Result of searching the tolerance that yields a requested coarse size.
#[derive(Clone, Debug)]
pub struct TunedLeaderFollower {
    pub tolerance: f64,
    pub assignment: ClusterAssignment,
}

/// Bisects the leader-follower tolerance (leaders fixed) toward `target` clusters.
///
/// The cluster count is piecewise constant in the tolerance and, in practice,
/// non-increasing; when no tolerance hits `target` exactly the closest count
/// found is returned.
pub fn tune_leader_follower(
    x: &FeatureMatrix,
    target: usize,
    distance: DistanceMeasure,
) -> Result<TunedLeaderFollower> {
    let f = x.n_features();
    if target == 0 || target > f {
        return Err(Error::InvalidArgument(format!(
            "target coarse size {target} must lie in 1..={f}"
        )));
    }
    let cols = Columns::new(x);
    let run = |tol: f64| leader_follower_on(&cols, tol, distance, false);

    // smallest tolerance: only exact duplicates (distance 0) merge
    let mut lo = f64::MIN_POSITIVE;
    let lo_assign = run(lo)?;
    if lo_assign.n_clusters() <= target {
        return Ok(TunedLeaderFollower {
            tolerance: lo,
            assignment: lo_assign,
        });
    }
    let max_norm = (0..f).map(|j| cols.sq_norm(j)).fold(0.0, f64::max).sqrt();
    let mut hi = match distance {
        DistanceMeasure::Euclidean => 2.0 * max_norm + 1.0,
        DistanceMeasure::Cosine => 2.5,
        DistanceMeasure::Jaccard => 1.5,
    };
    let mut best = TunedLeaderFollower {
        tolerance: lo,
        assignment: lo_assign,
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let a = run(mid)?;
        let k = a.n_clusters();
        let gap = k.abs_diff(target);
        if gap < best.assignment.n_clusters().abs_diff(target) {
            best = TunedLeaderFollower {
                tolerance: mid,
                assignment: a,
            };
        }
        if k == target {
            break;
        }
        if k > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

/// Smallest strictly positive pairwise distance between feature columns, if any.
pub fn min_nonzero_pairwise_distance(x: &FeatureMatrix, distance: DistanceMeasure) -> Option<f64> {
    let cols = Columns::new(x);
    let mut best: Option<f64> = None;
    for i in 0..cols.len() {
        for j in (i + 1)..cols.len() {
            let d = distance.between(cols.col(i), cols.col(j));
            if d > 0.0 && best.is_none_or(|b| d < b) {
                best = Some(d);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FeatureMatrix {
        let entries: Vec<_> = points
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(j, &v)| (0, j, v))
            .collect();
        FeatureMatrix::from_triplets(1, points.len(), &entries).unwrap()
    }

    #[test]
    fn sequential_rule_on_a_line() {
        let x = line(&[0.0, 0.05, 10.0]);
        let a = leader_follower(&x, 0.1, DistanceMeasure::Euclidean, false).unwrap();
        assert_eq!(a.membership(), &[0, 0, 1]);
        assert_eq!(a.prototype_features().unwrap(), &[0, 2]);
    }

    #[test]
    fn huge_tolerance_gives_one_cluster() {
        let x = line(&[3.0, -7.0, 10.0, 0.5]);
        let a = leader_follower(&x, 1e9, DistanceMeasure::Euclidean, false).unwrap();
        assert_eq!(a.n_clusters(), 1);
        assert_eq!(a.prototype_features().unwrap(), &[0]);
    }

    #[test]
    fn tiny_tolerance_separates_distinct_features() {
        let x = line(&[1.0, 2.0, 1.0 + 1e-9, 3.0]);
        let a = leader_follower(&x, 1e-12, DistanceMeasure::Euclidean, false).unwrap();
        assert_eq!(a.membership(), &[0, 1, 2, 3]);
        // exact duplicates still merge: their distance is zero
        let x = line(&[1.0, 2.0, 1.0, 3.0]);
        let a = leader_follower(&x, f64::MIN_POSITIVE, DistanceMeasure::Euclidean, false).unwrap();
        assert_eq!(a.membership(), &[0, 1, 0, 2]);
    }

    #[test]
    fn updated_leader_moves_to_mean() {
        let x = line(&[0.0, 1.0, 2.0]);
        let a = leader_follower(&x, 1.5, DistanceMeasure::Euclidean, true).unwrap();
        // 1.0 joins 0.0 (leader -> 0.5), then 2.0 is 1.5 away: new cluster
        assert_eq!(a.membership(), &[0, 0, 1]);
        match a.prototypes() {
            Prototypes::Centroids(c) => {
                assert_eq!(c[0], vec![0.5]);
                assert_eq!(c[1], vec![2.0]);
            }
            _ => panic!("expected centroids"),
        }
    }

    #[test]
    fn rejects_nonpositive_tolerance() {
        let x = line(&[1.0]);
        assert!(leader_follower(&x, 0.0, DistanceMeasure::Euclidean, false).is_err());
    }

    #[test]
    fn tuning_hits_target() {
        let x = line(&[0.0, 0.1, 0.3, 0.7, 1.5, 3.1, 6.3]);
        for target in 1..=7 {
            let t = tune_leader_follower(&x, target, DistanceMeasure::Euclidean).unwrap();
            assert_eq!(t.assignment.n_clusters(), target, "target {target}");
        }
    }

    #[test]
    fn min_pairwise_ignores_duplicates() {
        let x = line(&[1.0, 1.0, 1.25, 4.0]);
        assert_eq!(min_nonzero_pairwise_distance(&x, DistanceMeasure::Euclidean), Some(0.25));
    }
}
