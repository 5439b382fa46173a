//! Seeded variate stream shared by the samplers of one trajectory.
//!
//! Every trajectory owns a ChaCha8 generator seeded with a single `u64`.
//! Ensembles derive the seed of trajectory `i` from the base seed with
//! [`derive_seed`], so any trajectory can be reproduced from the seed
//! recorded in its file header alone.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct ClockRng {
    inner: ChaCha8Rng,
    consumed: u64,
}

impl ClockRng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            consumed: 0,
        }
    }

    /// Uniform variate on the open interval (0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.consumed += 1;
        self.inner.sample(Open01)
    }

    /// Number of uniforms drawn so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trajectory `index` in an ensemble started from `base`:
/// `splitmix64(base ^ splitmix64(index))`.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}
