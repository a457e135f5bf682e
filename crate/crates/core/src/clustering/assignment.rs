use crate::error::{Error, Result};

/// What represents each cluster.
#[derive(Clone, Debug, PartialEq)]
pub enum Prototypes {
    /// An original feature column per cluster (leader-follower without updates, Renyi subsampling).
    Features(Vec<usize>),
    /// A dense mean vector per cluster, each of length `n_samples` (k-means, updated leaders).
    Centroids(Vec<Vec<f64>>),
}

impl Prototypes {
    pub fn len(&self) -> usize {
        match self {
            Prototypes::Features(f) => f.len(),
            Prototypes::Centroids(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Partition of the features into non-empty clusters.
#[derive(Clone, Debug, PartialEq)]
pub struct ClusterAssignment {
    membership: Vec<usize>,
    sizes: Vec<usize>,
    prototypes: Prototypes,
}

impl ClusterAssignment {
    /// Validates that `membership` hits every id in `0..n_clusters` and that
    /// feature prototypes sit in their own cluster.
    pub fn new(membership: Vec<usize>, n_clusters: usize, prototypes: Prototypes) -> Result<Self> {
        let mut sizes = vec![0usize; n_clusters];
        for (feature, &c) in membership.iter().enumerate() {
            if c >= n_clusters {
                return Err(Error::InvalidArgument(format!(
                    "feature {feature} assigned to cluster {c} but only {n_clusters} clusters exist"
                )));
            }
            sizes[c] += 1;
        }
        if let Some(empty) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::EmptyCluster(empty));
        }
        if prototypes.len() != n_clusters {
            return Err(Error::InvalidArgument(format!(
                "{} prototypes for {n_clusters} clusters",
                prototypes.len()
            )));
        }
        if let Prototypes::Features(protos) = &prototypes {
            for (c, &p) in protos.iter().enumerate() {
                if p >= membership.len() || membership[p] != c {
                    return Err(Error::InvalidArgument(format!(
                        "prototype feature {p} of cluster {c} is not a member of it"
                    )));
                }
            }
        }
        Ok(Self {
            membership,
            sizes,
            prototypes,
        })
    }

    /// Every feature in its own cluster, led by itself.
    pub fn singletons(n_features: usize) -> Self {
        Self {
            membership: (0..n_features).collect(),
            sizes: vec![1; n_features],
            prototypes: Prototypes::Features((0..n_features).collect()),
        }
    }

    pub fn n_features(&self) -> usize {
        self.membership.len()
    }

    pub fn n_clusters(&self) -> usize {
        self.sizes.len()
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn cluster_of(&self, feature: usize) -> usize {
        self.membership[feature]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn prototypes(&self) -> &Prototypes {
        &self.prototypes
    }

    /// Prototype feature indices, when prototypes are original columns.
    pub fn prototype_features(&self) -> Option<&[usize]> {
        match &self.prototypes {
            Prototypes::Features(f) => Some(f),
            Prototypes::Centroids(_) => None,
        }
    }

    /// Member lists per cluster, each in increasing feature order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = self.sizes.iter().map(|&s| Vec::with_capacity(s)).collect();
        for (f, &c) in self.membership.iter().enumerate() {
            out[c].push(f);
        }
        out
    }
}
