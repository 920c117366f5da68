//! Seed derivation.
//!
//! `master_seed` -> replicate seed via a SplitMix64 finalizer over
//! `master_seed + replicate` (a bijection on u64, so replicate seeds are
//! pairwise distinct). Each replicate seed keys a ChaCha8 generator whose
//! stream id separates consumers: stream 0 builds the problem instance,
//! stream `1 + i` drives island `i`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

const PROBLEM_STREAM: u64 = 0;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_seed(master_seed: u64, replicate: u64) -> u64 {
    splitmix64(master_seed.wrapping_add(replicate))
}

fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn problem_rng(run_seed: u64) -> SimRng {
    stream(run_seed, PROBLEM_STREAM)
}

pub fn island_rng(run_seed: u64, island: usize) -> SimRng {
    stream(run_seed, 1 + island as u64)
}
