//! Hit-or-miss Monte Carlo volume of `co{±v_i}` in any dimension.

use rand::Rng as _;
use serde::Serialize;

use super::gauge::gauge_l1;
use crate::error::{Error, Result};
use crate::frames::Frame;
use crate::rng;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub estimate: T,
    pub stderr: T,
    pub samples: usize,
}

/// Samples the box `[−r, r]^k`, `r = max |v_i|`, and tests membership with
/// the ℓ1 gauge. Deterministic in `seed`.
pub fn mc_volume<T: Real>(s: &Frame<T>, samples: usize, seed: u64) -> Result<McEstimate<T>> {
    if samples < 1000 {
        return Err(Error::Precondition(format!("need at least 1000 samples, got {samples}")));
    }
    let r = s.max_norm();
    let k = s.k();
    let mut g = rng::seeded(seed);
    let mut hits = 0usize;
    let mut x = vec![T::zero(); k];
    for _ in 0..samples {
        for c in x.iter_mut() {
            *c = r * T::lit(g.random_range(-1.0..=1.0));
        }
        if gauge_l1(s, &x)? <= T::one() {
            hits += 1;
        }
    }
    let box_volume = (r + r).powi(k as i32);
    let p = hits as f64 / samples as f64;
    let se = (p * (1.0 - p) / samples as f64).sqrt();
    Ok(McEstimate {
        estimate: box_volume * T::lit(p),
        stderr: box_volume * T::lit(se),
        samples,
    })
}
