use serde::{Deserialize, Serialize};

use super::assignment::ClusterAssignment;
use super::distance::DistanceMeasure;
use super::kmeans::kmeans;
use super::leader::{leader_follower, tune_leader_follower};
use super::renyi::{renyi_subsample, Bandwidth};
use crate::error::Result;
use crate::sparse::FeatureMatrix;

fn default_kmeans_iters() -> usize {
    100
}

fn default_swaps() -> usize {
    1000
}

/// Declarative choice of clustering algorithm and its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClusteringSpec {
    /// Leader-follower with a fixed tolerance.
    LeaderFollower {
        tolerance: f64,
        #[serde(default)]
        distance: DistanceMeasure,
        #[serde(default)]
        update_leaders: bool,
    },
    /// Leader-follower with the tolerance searched to reach `n_clusters`.
    LeaderFollowerTarget {
        n_clusters: usize,
        #[serde(default)]
        distance: DistanceMeasure,
    },
    #[serde(rename = "kmeans")]
    KMeans {
        n_clusters: usize,
        #[serde(default = "default_kmeans_iters")]
        max_iters: usize,
        #[serde(default)]
        seed: u64,
    },
    Renyi {
        n_clusters: usize,
        #[serde(default)]
        bandwidth: Bandwidth,
        #[serde(default = "default_swaps")]
        n_swaps: usize,
        #[serde(default)]
        seed: u64,
        #[serde(default)]
        distance: DistanceMeasure,
    },
}

impl ClusteringSpec {
    pub fn run(&self, x: &FeatureMatrix) -> Result<ClusterAssignment> {
        match self {
            Self::LeaderFollower {
                tolerance,
                distance,
                update_leaders,
            } => leader_follower(x, *tolerance, *distance, *update_leaders),
            Self::LeaderFollowerTarget { n_clusters, distance } => {
                tune_leader_follower(x, *n_clusters, *distance).map(|t| t.assignment)
            }
            Self::KMeans {
                n_clusters,
                max_iters,
                seed,
            } => kmeans(x, *n_clusters, *max_iters, *seed),
            Self::Renyi {
                n_clusters,
                bandwidth,
                n_swaps,
                seed,
                distance,
            } => renyi_subsample(x, *n_clusters, bandwidth, *n_swaps, *seed, *distance).map(|r| r.assignment),
        }
    }

    /// Distance used for quality statistics and nearest-prototype searches.
    pub fn distance(&self) -> DistanceMeasure {
        match self {
            Self::LeaderFollower { distance, .. }
            | Self::LeaderFollowerTarget { distance, .. }
            | Self::Renyi { distance, .. } => *distance,
            Self::KMeans { .. } => DistanceMeasure::Euclidean,
        }
    }

    /// Short label used in result tables, e.g. `LF`, `KM`, `RE`.
    pub fn label(&self) -> &'static str {
        match self {
            Self::LeaderFollower { .. } | Self::LeaderFollowerTarget { .. } => "LF",
            Self::KMeans { .. } => "KM",
            Self::Renyi { .. } => "RE",
        }
    }
}
