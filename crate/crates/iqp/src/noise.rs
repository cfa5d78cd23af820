//! Independent bit-flip noise on output samples.
//!
//! Each output bit flips independently with probability epsilon/2. Over
//! distributions this is convolution with a product Bernoulli kernel, which
//! is diagonal in the Fourier basis: the coefficient at mask s shrinks by
//! (1 - epsilon)^|s|. That damping form is what both the analysis and the
//! sampler use, so it is the primary implementation here and the sample-level
//! flip is the independent route checked against it.

use crate::error::{Error, Result};
use crate::rng::Rng;
use crate::simulate::Distribution;
use crate::wht::wht_real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub epsilon: f64,
}

impl NoiseParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::InvalidParam(format!(
                "epsilon {epsilon} outside [0, 1]"
            )));
        }
        Ok(NoiseParams { epsilon })
    }
}

/// Flip each of the n bits of x independently with probability epsilon/2.
pub fn flip_sample(x: u64, n: usize, epsilon: f64, rng: &mut Rng) -> u64 {
    let mut out = x;
    for b in 0..n {
        if rng.bernoulli(epsilon / 2.0) {
            out ^= 1u64 << b;
        }
    }
    out
}

/// Fourier coefficients p_hat(s) = 2^-n sum_x p(x) (-1)^(s.x), indexed by s.
pub fn fourier_of(dist: &Distribution) -> Vec<f64> {
    let mut coeffs = dist.probs().to_vec();
    wht_real(&mut coeffs);
    let scale = 1.0 / coeffs.len() as f64;
    for c in &mut coeffs {
        *c *= scale;
    }
    coeffs
}

/// Rebuild a distribution from dense Fourier coefficients:
/// p(x) = sum_s coeffs[s] (-1)^(s.x). Errors if any reconstructed entry is
/// below -1e-12 or the mass is off 1.
pub fn synthesize(n: usize, coeffs: &[f64]) -> Result<Distribution> {
    if coeffs.len() != 1usize << n {
        return Err(Error::Dimension(format!(
            "need {} coefficients for n = {n}, got {}",
            1usize << n,
            coeffs.len()
        )));
    }
    let mut probs = coeffs.to_vec();
    wht_real(&mut probs);
    Distribution::new(n, probs)
}

/// Push a distribution through the bit-flip channel by Fourier damping.
pub fn apply_noise(dist: &Distribution, epsilon: f64) -> Result<Distribution> {
    let params = NoiseParams::new(epsilon)?;
    let mut coeffs = fourier_of(dist);
    for (s, c) in coeffs.iter_mut().enumerate() {
        *c *= (1.0 - params.epsilon).powi(s.count_ones() as i32);
    }
    synthesize(dist.n(), &coeffs)
}

/// Two flip channels in sequence equal one with this rate.
pub fn compose_epsilon(e1: f64, e2: f64) -> f64 {
    1.0 - (1.0 - e1) * (1.0 - e2)
}
