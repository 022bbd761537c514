//! Seed derivation shared by every stochastic component.
//!
//! Everything random is driven by a `ChaCha8Rng` seeded from a 64-bit value.
//! Work that fans out (series in a dataset, trees in a forest, replications in
//! a Monte Carlo study) derives one child seed per index so results do not
//! depend on evaluation order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for `index` under `base`, optionally namespaced by `stream`.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    mix64(mix64(base ^ mix64(stream.wrapping_add(0x5851_F42D_4C95_7F2D))).wrapping_add(index))
}
