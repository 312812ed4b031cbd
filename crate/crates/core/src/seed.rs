//! Seed derivation.
//!
//! Every random stream in the crate is a ChaCha8 generator seeded from a
//! 64-bit value derived from the user's master seed. Derivation is a pure
//! function of (master, indices), so results never depend on the order in
//! which parallel tasks are scheduled.
//!
//! Bit-exact definitions (stable across releases):
//!
//! ```text
//! mix64(x)   = z ← x + 0x9E3779B97F4A7C15
//!              z ← (z ⊕ (z >> 30)) · 0xBF58476D1CE4E5B9
//!              z ← (z ⊕ (z >> 27)) · 0x94D049BB133111EB
//!              z ⊕ (z >> 31)                       (wrapping u64 arithmetic)
//! child_seed(master, layer, unit) = mix64(master ⊕ (layer · 2^32 + unit))
//! stream_seed(base, tag, index)  = mix64(base ⊕ mix64(tag · 0x9E3779B97F4A7C15 ⊕ index))
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream tags used with [`stream_seed`].
pub mod tag {
    pub const REPETITION: u64 = 1;
    pub const KMEANS_RESTART: u64 = 2;
    pub const SPECTRAL: u64 = 3;
    pub const ENCODER: u64 = 4;
    pub const LANCZOS: u64 = 5;
}

/// SplitMix64 finalizer.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of clustering unit `unit` in layer `layer` (1-based).
pub fn child_seed(master: u64, layer: u32, unit: u32) -> u64 {
    mix64(master ^ (((layer as u64) << 32) | unit as u64))
}

pub fn stream_seed(base: u64, tag: u64, index: u64) -> u64 {
    mix64(base ^ mix64(tag.wrapping_mul(GOLDEN_GAMMA) ^ index))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
