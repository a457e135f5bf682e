use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::assignment::{ClusterAssignment, Prototypes};
use super::distance::{scaled_sq_distance, Columns, DistanceMeasure};
use crate::error::{Error, Result};
use crate::sparse::FeatureMatrix;

/// Default isotropic kernel bandwidth.
pub const DEFAULT_SIGMA: f64 = 0.6;

/// Diagonal kernel bandwidth `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bandwidth {
    /// `D = sigma * I`
    Isotropic(f64),
    /// One bandwidth per sample dimension.
    PerDimension(Vec<f64>),
}

impl Default for Bandwidth {
    fn default() -> Self {
        Bandwidth::Isotropic(DEFAULT_SIGMA)
    }
}

/// Precomputed kernel evaluation for one bandwidth over a fixed set of columns.
///
/// `kappa(x_k, x_l) = exp(-||(x_k - x_l) / (D sqrt 2)||^2 / 2)`, the radial basis
/// function evaluated at the bandwidth-scaled difference.
struct Kernel {
    /// `1 / (4 D_d^2)` per dimension, or a single value when isotropic.
    inv_sq_scale: Option<Vec<f64>>,
    iso_factor: f64,
    /// `log |D|`
    log_det: f64,
}

impl Kernel {
    fn new(bandwidth: &Bandwidth, dim: usize) -> Result<Self> {
        match bandwidth {
            Bandwidth::Isotropic(sigma) => {
                if !(*sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "kernel bandwidth must be positive, got {sigma}"
                    )));
                }
                Ok(Self {
                    inv_sq_scale: None,
                    iso_factor: 1.0 / (4.0 * sigma * sigma),
                    log_det: dim as f64 * sigma.ln(),
                })
            }
            Bandwidth::PerDimension(d) => {
                if d.len() != dim {
                    return Err(Error::DimensionMismatch {
                        context: "per-dimension kernel bandwidth",
                        expected: dim,
                        actual: d.len(),
                    });
                }
                if let Some(bad) = d.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidArgument(format!(
                        "kernel bandwidth must be positive, got {bad}"
                    )));
                }
                Ok(Self {
                    inv_sq_scale: Some(d.iter().map(|v| 1.0 / (4.0 * v * v)).collect()),
                    iso_factor: 1.0,
                    log_det: d.iter().map(|v| v.ln()).sum(),
                })
            }
        }
    }

    fn eval(&self, cols: &Columns, k: usize, l: usize) -> f64 {
        if k == l {
            return 1.0;
        }
        let q = scaled_sq_distance(cols.col(k), cols.col(l), self.inv_sq_scale.as_deref());
        (-q * self.iso_factor).exp()
    }

    /// `-log( sum / (m^2 |D|^2) )`, evaluated in log space so `|D|` cannot underflow.
    fn entropy(&self, kernel_sum: f64, m: usize) -> f64 {
        -(kernel_sum.ln() - 2.0 * (m as f64).ln()) + 2.0 * self.log_det
    }
}

/// Quadratic Renyi entropy of a subset of feature columns.
pub fn renyi_entropy(x: &FeatureMatrix, subset: &[usize], bandwidth: &Bandwidth) -> Result<f64> {
    if subset.is_empty() {
        return Err(Error::InvalidArgument("entropy of an empty subset".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&j| j >= x.n_features()) {
        return Err(Error::InvalidArgument(format!("feature {bad} out of range")));
    }
    let cols = Columns::new(x);
    let kernel = Kernel::new(bandwidth, cols.dim())?;
    Ok(kernel.entropy(full_sum(&kernel, &cols, subset), subset.len()))
}

fn full_sum(kernel: &Kernel, cols: &Columns, subset: &[usize]) -> f64 {
    let mut total = 0.0;
    for (a, &k) in subset.iter().enumerate() {
        total += 1.0;
        for &l in &subset[a + 1..] {
            total += 2.0 * kernel.eval(cols, k, l);
        }
    }
    total
}

/// Working set selected by entropy-increasing swaps, with the resulting clustering.
#[derive(Clone, Debug)]
pub struct RenyiSubsample {
    pub assignment: ClusterAssignment,
    /// Working-set features in cluster-id order (ascending feature index).
    pub working_set: Vec<usize>,
    /// Entropy of the initial working set followed by the entropy after each accepted swap.
    pub entropy_trace: Vec<f64>,
    pub accepted_swaps: usize,
}

impl RenyiSubsample {
    pub fn final_entropy(&self) -> f64 {
        *self.entropy_trace.last().expect("trace holds the initial entropy")
    }
}

/// Maximizes the working-set entropy by random swaps with the training set.
///
/// Each candidate pairs a random working-set member with a random training
/// feature; the swap is kept only when the working-set entropy strictly
/// increases. The kernel sum is updated incrementally in `O(F_C)` per candidate.
/// Remaining features join the cluster of the closest prototype under `distance`.
pub fn renyi_subsample(
    x: &FeatureMatrix,
    n_coarse: usize,
    bandwidth: &Bandwidth,
    n_swaps: usize,
    seed: u64,
    distance: DistanceMeasure,
) -> Result<RenyiSubsample> {
    let f = x.n_features();
    if n_coarse == 0 || n_coarse > f {
        return Err(Error::InvalidArgument(format!(
            "working set size {n_coarse} must lie in 1..={f}"
        )));
    }
    let cols = Columns::new(x);
    let kernel = Kernel::new(bandwidth, cols.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut in_work = vec![false; f];
    let mut work: Vec<usize> = sample(&mut rng, f, n_coarse).into_vec();
    work.iter().for_each(|&j| in_work[j] = true);
    let mut train: Vec<usize> = (0..f).filter(|&j| !in_work[j]).collect();

    let mut sum = full_sum(&kernel, &cols, &work);
    let mut entropy_trace = vec![kernel.entropy(sum, n_coarse)];
    let mut accepted_swaps = 0;

    if !train.is_empty() {
        for _ in 0..n_swaps {
            let wi = rng.gen_range(0..work.len());
            let ti = rng.gen_range(0..train.len());
            let (w, t) = (work[wi], train[ti]);
            let mut s_w = 0.0;
            let mut s_t = 0.0;
            for &l in &work {
                s_w += kernel.eval(&cols, w, l);
                s_t += kernel.eval(&cols, t, l);
            }
            let k_tw = kernel.eval(&cols, t, w);
            let candidate = sum - 2.0 * s_w + 1.0 + 2.0 * (s_t - k_tw) + 1.0;
            if candidate < sum {
                sum = candidate;
                work[wi] = t;
                train[ti] = w;
                accepted_swaps += 1;
                entropy_trace.push(kernel.entropy(sum, n_coarse));
            }
        }
    }

    work.sort_unstable();
    let mut cluster_of_proto = vec![usize::MAX; f];
    for (c, &p) in work.iter().enumerate() {
        cluster_of_proto[p] = c;
    }
    let membership: Vec<usize> = (0..f)
        .map(|j| {
            if cluster_of_proto[j] != usize::MAX {
                return cluster_of_proto[j];
            }
            let xj = cols.col(j);
            let mut best = (0usize, f64::INFINITY);
            for (c, &p) in work.iter().enumerate() {
                let d = distance.between(xj, cols.col(p));
                if d < best.1 {
                    best = (c, d);
                }
            }
            best.0
        })
        .collect();

    let assignment = ClusterAssignment::new(membership, n_coarse, Prototypes::Features(work.clone()))?;
    Ok(RenyiSubsample {
        assignment,
        working_set: work,
        entropy_trace,
        accepted_swaps,
    })
}
