//! Seeded, labeled random streams.
//!
//! Every random decision in the crate draws from a stream identified by
//! `(seed, label, index)`, so consumers never share state and results do not
//! depend on scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fnv1a(label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Independent generator for the named stream.
pub fn stream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(label) ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15));
    rng
}

/// A fresh seed derived from the named stream, for handing to components
/// that take a plain seed.
pub fn derive_seed(seed: u64, label: &str, index: u64) -> u64 {
    stream(seed, label, index).next_u64()
}
