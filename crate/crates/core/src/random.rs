//! Seed derivation, Gaussian multipliers and empirical quantiles.
//!
//! Every stochastic routine takes one caller seed. Independent streams
//! (replications, bootstrap draws, folds) are derived from it by hashing a
//! path of integers, so results never depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::scalar::Real;

/// Deterministic generator used throughout the crate.
pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes `master` and a path of stream identifiers into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, path))
}

/// Fills `out` with independent standard Gaussian draws.
pub fn fill_gaussian<T: Real>(rng: &mut StreamRng, out: &mut [T]) {
    for o in out.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *o = T::lit(z);
    }
}

/// Empirical `level` quantile: the order statistic of rank `⌈level·B⌉`
/// (1-based, clamped to `[1, B]`). Sorts `draws` in place.
pub fn empirical_quantile<T: Real>(draws: &mut [T], level: f64) -> T {
    assert!(!draws.is_empty(), "quantile of an empty sample");
    draws.sort_by(|a, b| a.partial_cmp(b).expect("NaN in bootstrap draws"));
    draws[quantile_rank(draws.len(), level) - 1]
}

/// 1-based rank `⌈level·B⌉` clamped to `[1, B]`.
pub fn quantile_rank(b: usize, level: f64) -> usize {
    // Guard against `0.95 * 1000 = 950.0000000000001`.
    let raw = level * b as f64;
    let rank = (raw - 1e-9 * raw.abs().max(1.0)).ceil();
    (rank.max(1.0) as usize).min(b)
}

/// Standard normal quantile function `Φ⁻¹(p)`.
pub fn normal_quantile(p: f64) -> f64 {
    Normal::standard().inverse_cdf(p)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Fisher–Yates shuffle of `0..n` driven by `rng`.
pub fn permutation(rng: &mut StreamRng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}
