//! Seed derivation.
//!
//! Every random stream in the crate is a `ChaCha8Rng` seeded from a `u64`.
//! Derived seeds come from SplitMix64 applied to the parent seed combined
//! with a stream tag, so trials and sub-tasks never share generator state.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for child stream `tag` of `parent`.
pub fn derive(parent: u64, tag: u64) -> u64 {
    mix64(mix64(parent) ^ tag.wrapping_mul(GOLDEN_GAMMA))
}

/// Seed of trial `trial` in an experiment seeded with `master`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    derive(master, 0x7472_6961_6c00_0000 | trial as u64)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
