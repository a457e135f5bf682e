use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assignment::{ClusterAssignment, Prototypes};
use super::distance::{sq_euclidean, Columns, DistanceMeasure};
use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

fn check_k(k: usize, f: usize) -> Result<()> {
    if k == 0 || k > f {
        return Err(Error::InvalidArgument(format!(
            "number of clusters {k} must lie in 1..={f}"
        )));
    }
    Ok(())
}

/// k-means++ seeding over feature columns; returns the chosen feature indices in pick order.
///
/// The first pick is uniform. Each later pick is drawn with probability
/// proportional to the squared Euclidean distance to the nearest pick so far;
/// if every remaining distance is zero the pick is uniform over unpicked features.
pub fn kmeanspp_seed(x: &FeatureMatrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_k(k, x.n_features())?;
    let cols = Columns::new(x);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(seed_on(&cols, k, &mut rng))
}

fn seed_on(cols: &Columns, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let f = cols.len();
    let mut picked = vec![false; f];
    let mut chosen = Vec::with_capacity(k);
    let first = rng.gen_range(0..f);
    chosen.push(first);
    picked[first] = true;

    let mut nearest: Vec<f64> = (0..f)
        .map(|j| sq_euclidean(cols.col(j), cols.col(first)))
        .collect();
    nearest[first] = 0.0;

    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (j, &w) in nearest.iter().enumerate() {
                if w > 0.0 {
                    acc += w;
                    pick = Some(j);
                    if acc > target {
                        break;
                    }
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            let remaining: Vec<usize> = (0..f).filter(|&j| !picked[j]).collect();
            remaining[rng.gen_range(0..remaining.len())]
        };
        chosen.push(next);
        picked[next] = true;
        nearest[next] = 0.0;
        for j in 0..f {
            if !picked[j] {
                let d = sq_euclidean(cols.col(j), cols.col(next));
                if d < nearest[j] {
                    nearest[j] = d;
                }
            }
        }
    }
    chosen
}

/// Outcome of Lloyd iterations.
#[derive(Clone, Debug)]
pub struct KMeansOutcome {
    pub assignment: ClusterAssignment,
    /// Number of assignment passes performed.
    pub iterations: usize,
    pub converged: bool,
    /// `sum_i ||x_i - c(x_i)||^2` after every centroid update.
    pub objective_trace: Vec<f64>,
}

/// Lloyd's algorithm on feature columns from k-means++ seeds.
pub fn kmeans(x: &FeatureMatrix, k: usize, max_iters: usize, seed: u64) -> Result<ClusterAssignment> {
    Ok(kmeans_detailed(x, k, max_iters, seed)?.assignment)
}

pub fn kmeans_detailed(x: &FeatureMatrix, k: usize, max_iters: usize, seed: u64) -> Result<KMeansOutcome> {
    let f = x.n_features();
    check_k(k, f)?;
    if max_iters == 0 {
        return Err(Error::InvalidArgument("k-means needs at least one iteration".into()));
    }
    let cols = Columns::new(x);
    let n = cols.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds = seed_on(&cols, k, &mut rng);

    let mut centroids: Vec<Vec<f64>> = seeds.iter().map(|&j| cols.to_dense(j)).collect();
    let mut membership = vec![usize::MAX; f];
    let mut objective_trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iters {
        iterations += 1;
        let centroid_sq: Vec<f64> = centroids.iter().map(|c| c.iter().map(|v| v * v).sum()).collect();
        let mut changed = false;
        for j in 0..f {
            let col = cols.col(j);
            let xx = cols.sq_norm(j);
            let mut best = (0usize, f64::INFINITY);
            for (s, c) in centroids.iter().enumerate() {
                let d = (xx + centroid_sq[s] - 2.0 * col.dot_dense(c)).max(0.0);
                if d < best.1 {
                    best = (s, d);
                }
            }
            if membership[j] != best.0 {
                membership[j] = best.0;
                changed = true;
            }
        }
        if !changed {
            converged = true;
            break;
        }

        repair_empty_clusters(&cols, &mut membership, &mut centroids, k);
        update_centroids(&cols, &membership, &mut centroids, n);
        objective_trace.push(objective(&cols, &membership, &centroids));
    }

    let assignment = ClusterAssignment::new(membership, k, Prototypes::Centroids(centroids))?;
    Ok(KMeansOutcome {
        assignment,
        iterations,
        converged,
        objective_trace,
    })
}

fn update_centroids(cols: &Columns, membership: &[usize], centroids: &mut [Vec<f64>], n: usize) {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for c in centroids.iter_mut() {
        c.clear();
        c.resize(n, 0.0);
    }
    for (j, &s) in membership.iter().enumerate() {
        counts[s] += 1;
        let col = cols.col(j);
        for (&i, &v) in col.indices.iter().zip(col.values) {
            centroids[s][i] += v;
        }
    }
    for (c, &cnt) in centroids.iter_mut().zip(&counts) {
        let inv = 1.0 / cnt as f64;
        c.iter_mut().for_each(|v| *v *= inv);
    }
}

/// Reseeds each empty cluster at the feature farthest from its current
/// prototype, taken from a cluster that keeps at least one member.
fn repair_empty_clusters(cols: &Columns, membership: &mut [usize], centroids: &mut [Vec<f64>], k: usize) {
    loop {
        let mut sizes = vec![0usize; k];
        for &s in membership.iter() {
            sizes[s] += 1;
        }
        let Some(empty) = sizes.iter().position(|&s| s == 0) else {
            return;
        };
        let mut far = (usize::MAX, -1.0);
        for (j, &s) in membership.iter().enumerate() {
            if sizes[s] < 2 {
                continue;
            }
            let d = DistanceMeasure::Euclidean.to_dense(cols.col(j), &centroids[s]);
            if d > far.1 {
                far = (j, d);
            }
        }
        // k <= F guarantees some cluster holds two or more features
        let (j, _) = far;
        membership[j] = empty;
        centroids[empty] = cols.to_dense(j);
    }
}

fn objective(cols: &Columns, membership: &[usize], centroids: &[Vec<f64>]) -> f64 {
    membership
        .iter()
        .enumerate()
        .map(|(j, &s)| DistanceMeasure::Euclidean.to_dense(cols.col(j), &centroids[s]).powi(2))
        .sum()
}
