//! Deterministic randomness plumbing: per-trial seeds and named substreams.
//!
//! Every trial draws all of its randomness from a single `u64` seed, split into
//! independent named ChaCha streams. Keeping the roles on separate streams makes
//! paired experiments exact: swapping two roles (e.g. mock draws vs. real
//! draws) or toggling a flag that consumes one stream leaves every other
//! stream's output bit-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The RNG used everywhere randomness is consumed.
pub type SubRng = ChaCha8Rng;

/// Roles a trial's randomness is split into.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Stream {
    /// Instance/distribution generation.
    Generate = 0,
    /// Sampled (mock) request draws in the reductions.
    MockDraw = 1,
    /// Arrival-order shuffling.
    Shuffle = 2,
    /// Real request draws in the reductions.
    RealDraw = 3,
    /// The online algorithm's own coins.
    Algorithm = 4,
}

/// Derive the seed for one trial from the experiment's base seed.
/// SplitMix64 finalization keeps nearby trial indices uncorrelated.
pub fn trial_seed(base_seed: u64, trial: u32) -> u64 {
    let mut x = base_seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// The named substream of a seed.
pub fn substream(seed: u64, stream: Stream) -> SubRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64 + 1);
    rng
}

/// In-place Fisher–Yates shuffle.
pub fn fisher_yates<T, R: Rng + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// A uniformly random `k`-subset of `0..n` (Fisher–Yates prefix), sorted.
pub fn sample_indices<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    let k = k.min(n);
    // Partial Fisher–Yates: fix positions from the back, k times.
    for i in ((n - k)..n).rev() {
        let j = rng.gen_range(0..=i);
        idx.swap(i, j);
    }
    let mut picked: Vec<usize> = idx[n - k..].to_vec();
    picked.sort_unstable();
    picked
}
