//! Seeded random streams.
//!
//! Every sampler takes an explicit generator. Batch item `i` of a run seeded
//! with `seed` draws from `ChaCha20` seeded with `seed ^ (GOLDEN * i)`.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type SeedRng = ChaCha20Rng;

/// Name of the core generator, recorded in every run header.
pub const GENERATOR: &str = "chacha20 (rand_chacha 0.9, seed_from_u64)";

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn rng_from_seed(seed: u64) -> SeedRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn substream_seed(seed: u64, index: u64) -> u64 {
    seed ^ GOLDEN.wrapping_mul(index)
}

pub fn substream(seed: u64, index: u64) -> SeedRng {
    rng_from_seed(substream_seed(seed, index))
}
