//! Size caps for the dense code paths.

/// Default cap on the feature count for dense eigen-analysis.
pub const DEFAULT_DENSE_CAP: usize = 8192;

/// Default cap on the coarsest level size factorized by dense Cholesky.
pub const DEFAULT_DIRECT_CAP: usize = 4096;

/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "FEATMG_DENSE_CAP";

/// Dense-path cap, honoring `FEATMG_DENSE_CAP` when it parses as a positive integer.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_DENSE_CAP)
}
