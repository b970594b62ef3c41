//! Deterministic seed derivation.
//!
//! Every random stream in the crate is derived from a master `u64` seed with
//! the SplitMix64 finalizer, so that frame `i` of a set (or pixel `i` of a
//! frame) can be regenerated in isolation:
//!
//! ```text
//! mix64(z):
//!     z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//!     z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//!     z ^ (z >> 31)
//!
//! derive_frame_seed(master, i) = mix64(master + 0x9E3779B97F4A7C15 * (i + 1))
//! ```
//!
//! All arithmetic wraps modulo 2^64. `derive_frame_seed(master, i)` is the
//! `(i + 1)`-th output of a SplitMix64 generator whose state starts at `master`.
//! Random variates are drawn from ChaCha8 generators seeded through
//! [`rng_from_seed`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_frame_seed(master_seed: u64, frame_index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(frame_index.wrapping_add(1))))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Plain SplitMix64 stream. Used where a portable, documented sequence
/// matters more than statistical strength.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
