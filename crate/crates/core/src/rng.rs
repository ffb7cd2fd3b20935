//! Deterministic counter-based randomness.
//!
//! All randomized operations in this crate draw from ChaCha12 streams keyed
//! by a user seed. Per-sample noise uses one substream per sample index, so
//! draws are independent of iteration order and can run in parallel without
//! changing results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Root generator for a seeded operation.
pub fn master(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Independent substream `index` under `seed`.
///
/// ChaCha exposes 2^64 independent streams per key; substream selection is
/// O(1) and order-free.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a child seed for a nested stage (level, draw, split, ...).
///
/// SplitMix64 finalizer over the concatenated words; collision-free enough
/// for experiment bookkeeping and stable across platforms.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    let mut z = seed;
    for &w in words {
        z = z.wrapping_add(0x9e3779b97f4a7c15).wrapping_add(w);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn substreams_are_independent_and_reproducible() {
        let a: f64 = substream(7, 0).gen();
        let b: f64 = substream(7, 1).gen();
        let a2: f64 = substream(7, 0).gen();
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn derive_seed_varies_with_each_word() {
        let s = derive_seed(1, &[2, 3]);
        assert_ne!(s, derive_seed(1, &[2, 4]));
        assert_ne!(s, derive_seed(1, &[3, 3]));
        assert_ne!(s, derive_seed(2, &[2, 3]));
        assert_eq!(s, derive_seed(1, &[2, 3]));
    }
}
