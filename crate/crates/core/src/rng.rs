//! Seeded random streams.
//!
//! Every stochastic routine takes its RNG from the caller. Independent streams for
//! folds, test instances and trees are derived from one base seed so that results do
//! not depend on scheduling.

use rand::SeedableRng;

/// The generator used throughout the crate.
pub type ChainRng = rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a path of tags into a new seed.
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(base), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng_from_seed(seed: u64) -> ChainRng {
    ChainRng::seed_from_u64(seed)
}

pub fn derived_rng(base: u64, tags: &[u64]) -> ChainRng {
    ChainRng::seed_from_u64(derive_seed(base, tags))
}
