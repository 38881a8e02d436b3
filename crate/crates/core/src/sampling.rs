//! Seeded uniform sampling of truth tables.
//!
//! A stream is a xoshiro256** generator whose state is filled by SplitMix64
//! started at `master_seed ^ stream_index * 0x9E3779B97F4A7C15`. Table words
//! are consecutive 64-bit outputs, bits consumed low to high, so the table at
//! `n` is a prefix of the table at `n + 1` for the same seed.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::truth_table::{tail_mask, word_count, TruthTable};

/// Fixed default master seed used when none is supplied.
pub const DEFAULT_MASTER_SEED: u64 = 0xB0A1_1F00_42D5_EC7A;

/// Version tag of the stream derivation; bump if the derivation changes.
pub const STREAM_FORMAT_VERSION: &str = "splitmix64-xoshiro256starstar/1";

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_index,
        }
    }

    /// The `i`-th sub-stream relative to this one.
    pub fn derive(&self, i: u64) -> SeedSpec {
        SeedSpec {
            master_seed: self.master_seed,
            stream_index: self.stream_index.wrapping_add(i),
        }
    }

    pub fn rng(&self) -> Xoshiro256StarStar {
        Xoshiro256StarStar::seed_from_u64(self.master_seed ^ self.stream_index.wrapping_mul(GOLDEN_GAMMA))
    }
}

impl Default for SeedSpec {
    fn default() -> Self {
        SeedSpec::new(DEFAULT_MASTER_SEED, 0)
    }
}

/// Draws a table uniformly from all 2^(2^n) functions on `n` variables.
pub fn sample_uniform(seed: &SeedSpec, n: u32) -> Result<TruthTable> {
    // Validates n before allocating.
    TruthTable::zero(n)?;
    let mut rng = seed.rng();
    let mut words: Vec<u64> = (0..word_count(n)).map(|_| rng.next_u64()).collect();
    words[0] &= tail_mask(n);
    Ok(TruthTable::from_words_unchecked(n, words))
}
