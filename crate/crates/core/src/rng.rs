//! Deterministic RNG stream derivation.
//!
//! Every random decision in a run is drawn from a stream keyed by a path of
//! integers (master seed, trial, generation, individual, purpose). Streams are
//! derived from the key alone, never from evaluation order, so a population can
//! be evaluated on any number of threads with identical results.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// Purposes used as the final key component.
pub mod purpose {
    pub const INIT: u64 = 1;
    pub const CONNECTIVITY: u64 = 2;
    pub const SIMULATION: u64 = 3;
    pub const BREEDING: u64 = 4;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hashes a key path into a 64-bit seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &k| splitmix64(acc ^ splitmix64(k)))
}

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn derive_stream(master: u64, path: &[u64]) -> Stream {
    stream(derive_seed(master, path))
}
