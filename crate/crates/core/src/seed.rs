//! Seed derivation for batches of runs.
//!
//! Every run owns a single ChaCha8 stream seeded from one 64-bit value.
//! Batches derive per-run seeds by passing `base + index` through the
//! SplitMix64 finalizer, which decorrelates the otherwise consecutive
//! inputs. Both names are recorded in output metadata.

/// Name of the per-run generator, for output metadata.
pub const GENERATOR: &str = "ChaCha8";

/// Name of the seed-mixing function, for output metadata.
pub const SEED_MIXER: &str = "SplitMix64(seed + index)";

/// SplitMix64 step: advance by the 64-bit golden gamma, then finalize.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `index` within a batch based at `base`.
pub fn run_seed(base: u64, index: u64) -> u64 {
    splitmix64(base.wrapping_add(index))
}

/// The per-run seeds of a whole batch.
pub fn batch_seeds(base: u64, replicates: u32) -> Vec<u64> {
    (0..replicates as u64).map(|i| run_seed(base, i)).collect()
}
