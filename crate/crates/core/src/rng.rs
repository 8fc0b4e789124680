//! Deterministic random streams.
//!
//! Every random quantity in the crate is drawn from a [`ChaCha8Rng`] seeded
//! with [`SeedableRng::seed_from_u64`]. Independent streams are derived from a
//! 64-bit master seed and a stream index with [`derive_seed`], a SplitMix64
//! finalizer applied to `master + (index + 1) * 0x9E3779B97F4A7C15`. These
//! constants are part of the output format: changing them changes every CSV
//! and trace the crate produces.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output permutation.
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the `index`-th stream under `master`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    splitmix64(master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn stream(master: u64, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, index))
}

/// Sub-streams of a single run. Losses, noise, and certifier comparators use
/// separate streams so that swapping the learner leaves the environment fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    Environment = 0,
    Noise = 1,
    Comparators = 2,
    Interpolation = 3,
}

pub fn substream(run_seed: u64, which: Substream) -> StreamRng {
    stream(run_seed, which as u64)
}
