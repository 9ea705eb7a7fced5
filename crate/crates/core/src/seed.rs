//! Deterministic seed derivation.
//!
//! `derive_subseed(master, label, index)` is
//!
//! ```text
//! splitmix64(master ⊕ splitmix64(fnv1a64(label) ⊕ splitmix64(index)))
//! ```
//!
//! with the standard SplitMix64 finalizer (golden-gamma increment
//! `0x9E3779B97F4A7C15`, multipliers `0xBF58476D1CE4E5B9` and
//! `0x94D049BB133111EB`) and 64-bit FNV-1a over the UTF-8 bytes of the label.
//! The outer finalizer is a bijection, so for a fixed master seed two
//! `(label, index)` pairs collide only if their inner mixes collide.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn derive_subseed(master: u64, label: &str, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(fnv1a64(label.as_bytes()) ^ splitmix64(index)))
}

/// The generator every sampler in this crate draws from.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
