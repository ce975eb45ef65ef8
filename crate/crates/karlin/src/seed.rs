//! Reproducible seed derivation.
//!
//! Replications get statistically independent streams from a single
//! master seed through a SplitMix64 finalizer; the mapping is pure, so
//! any replication can be regenerated in isolation regardless of thread
//! scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Child seed for one replication: H(master_seed, replication_index).
pub fn child_seed(master_seed: u64, replication: u64) -> u64 {
    // Feed the index through the golden-ratio increment before mixing so
    // that (m, r) and (m+1, r-1) style collisions cannot happen linearly.
    splitmix64(master_seed ^ splitmix64(replication.wrapping_add(0x9E3779B97F4A7C15)))
}

/// Deterministic RNG for one replication.
pub fn replication_rng(master_seed: u64, replication: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(child_seed(master_seed, replication))
}
