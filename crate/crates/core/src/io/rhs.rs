use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sparse::FeatureMatrix;

/// Name and version of the right-hand-side generator, recorded in outputs.
pub const RHS_GENERATOR: &str = "splitmix64-counter/box-muller v1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// `k`-th SplitMix64 output for `seed`: `mix(seed + (k + 1) * 0x9E3779B97F4A7C15)`.
pub fn splitmix64_at(seed: u64, k: u64) -> u64 {
    mix(seed.wrapping_add(k.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Open-interval uniform `((u >> 11) + 0.5) * 2^-53`.
fn to_unit(u: u64) -> f64 {
    ((u >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// `n` standard normal draws.
///
/// Pair `j` uses counters `2j` and `2j + 1` as `u1`, `u2`; Box-Muller gives
/// `sqrt(-2 ln u1) cos(2 pi u2)` at index `2j` and the sine at `2j + 1`.
pub fn standard_normal(seed: u64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut pair = 0u64;
    while out.len() < n {
        let u1 = to_unit(splitmix64_at(seed, 2 * pair));
        let u2 = to_unit(splitmix64_at(seed, 2 * pair + 1));
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        out.push(r * theta.cos());
        if out.len() < n {
            out.push(r * theta.sin());
        }
        pair += 1;
    }
    out
}

/// Distribution of the sample-space vector `b`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsDistribution {
    #[default]
    StandardNormal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhsSpec {
    pub seed: u64,
    #[serde(default)]
    pub distribution: RhsDistribution,
}

impl RhsSpec {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            distribution: RhsDistribution::StandardNormal,
        }
    }
}

/// Draws `b` (length `N`) and returns it with `X^T b` (length `F`).
pub fn generate_rhs(x: &FeatureMatrix, spec: &RhsSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let b = match spec.distribution {
        RhsDistribution::StandardNormal => standard_normal(spec.seed, x.n_samples()),
    };
    let rhs = x.spmv_transpose(&b)?;
    Ok((b, rhs))
}
