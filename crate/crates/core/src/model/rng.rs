//! Keyed random streams.
//!
//! Every random quantity is drawn from a stream keyed by
//! `(master seed, purpose tag, index tuple)`, so values never depend on the
//! order in which they are requested.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Mixes a master seed, tag and index tuple into a sub-seed.
pub fn derive_seed(master: u64, tag: &str, index: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &b in tag.as_bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h = splitmix64(h ^ index.len() as u64);
    for &i in index {
        h = splitmix64(h ^ i);
    }
    h
}

pub fn keyed_rng(master: u64, tag: &str, index: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tag, index))
}
