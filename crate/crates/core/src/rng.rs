//! Deterministic random substreams.
//!
//! All randomness is derived from a single user seed. Each unit of work
//! (a CV split, a permutation, a K in the sweep) gets its own generator
//! keyed by a stream name and integer coordinates, so results do not depend
//! on the order in which work units are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a stream name.
pub fn substream(seed: u64, name: &str) -> u64 {
    // FNV-1a over the name, then mixed with the parent.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    splitmix64(seed ^ splitmix64(h))
}

/// Derives a child seed from a parent seed and integer coordinates.
pub fn derive(seed: u64, coords: &[u64]) -> u64 {
    coords.iter().fold(splitmix64(seed), |acc, &c| splitmix64(acc ^ splitmix64(c.wrapping_add(1))))
}

pub fn rng_at(seed: u64, coords: &[u64]) -> Rng {
    Rng::seed_from_u64(derive(seed, coords))
}
