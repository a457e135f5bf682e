//! Feature clustering that defines coarse levels.
//!
//! Every algorithm clusters the *columns* of a [`FeatureMatrix`](crate::sparse::FeatureMatrix):
//! each feature is a point in sample space. All randomized routines take an
//! explicit seed and are deterministic for a fixed seed.

mod assignment;
mod distance;
mod kmeans;
mod leader;
mod renyi;
mod spec;
mod stats;

pub use assignment::{ClusterAssignment, Prototypes};
pub use distance::{Columns, DistanceMeasure, SparseCol};
pub use kmeans::{kmeans, kmeans_detailed, kmeanspp_seed, KMeansOutcome};
pub use leader::{leader_follower, min_nonzero_pairwise_distance, tune_leader_follower, TunedLeaderFollower};
pub use renyi::{renyi_entropy, renyi_subsample, Bandwidth, RenyiSubsample, DEFAULT_SIGMA};
pub use spec::ClusteringSpec;
pub use stats::{cluster_stats, ClusterQuality};
