//! Index-addressable random streams.
//!
//! Every pair draws from its own ChaCha12 stream: the key is expanded from
//! the run seed by `SeedableRng::seed_from_u64` and the 64-bit stream id is
//! the pair index. Pair i's draws therefore depend only on (seed, i), not
//! on how pairs are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type PairRng = ChaCha12Rng;

pub fn pair_stream(seed: u64, index: u64) -> PairRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed for the `k`-th sub-run of a run seeded with `master`.
pub fn derive_seed(master: u64, k: u64) -> u64 {
    mix64(master.wrapping_add(k.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}
