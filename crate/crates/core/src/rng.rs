//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`seeded`], a ChaCha8 stream
//! keyed by `ChaCha8Rng::seed_from_u64`. ChaCha output is specified
//! bit-for-bit, so identical seeds give identical frames on every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::Real;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Child seed for stream `index` of a parent seed (SplitMix64 finaliser).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian<T: Real>(rng: &mut Rng) -> T {
    let x: f64 = StandardNormal.sample(rng);
    T::lit(x)
}

pub fn gaussian_vec<T: Real>(rng: &mut Rng, dim: usize) -> Vec<T> {
    (0..dim).map(|_| gaussian(rng)).collect()
}
