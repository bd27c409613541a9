//! Seeded random streams.
//!
//! Every random object in the crate is driven by a [`WalkRng`] built from a
//! single `u64` seed. Independent streams for sweeps are derived from a master
//! seed with [`derive_seed`], so a run can be replayed from `(master, point,
//! run)` alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout: ChaCha with 8 rounds.
pub type WalkRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> WalkRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a child index into a parent seed: `splitmix64(parent ^ splitmix64(child))`.
pub fn child_seed(parent: u64, child: u64) -> u64 {
    splitmix64(parent ^ splitmix64(child))
}

/// Seed for run `run` of grid point `point` under `master`.
///
/// Defined as `child_seed(child_seed(master, point), run)`. This function is
/// part of the output format: changing it changes every recorded seed.
pub fn derive_seed(master: u64, point: u64, run: u64) -> u64 {
    child_seed(child_seed(master, point), run)
}
