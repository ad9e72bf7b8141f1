//! Seeding and Gaussian variate generation.
//!
//! A counter-based stream cipher RNG keyed by a 64-bit seed drives all data
//! generation; Gaussian draws use the polar Box-Muller transform. Identical
//! (seed, build) pairs give bit-identical streams. Across different builds or
//! platforms only statistical reproducibility is guaranteed.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// SplitMix64 finalizer; a bijective 64-bit mix.
#[inline]
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d049bb133111eb);
    x ^ (x >> 31)
}

/// Derive an independent per-trial seed from a root seed.
///
/// The derivation is `root ^ mix(cell, trial)`, so streams are uncorrelated
/// across grid cells and adding trials never perturbs earlier ones.
pub fn derive_seed(root: u64, cell: u64, trial: u64) -> u64 {
    root ^ splitmix64(splitmix64(cell).wrapping_add(trial))
}

/// Stream of standard normal variates.
pub struct GaussianSource {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl GaussianSource {
    pub fn new(seed: u64) -> Self {
        GaussianSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform draw in [0, 1) with 53 bits of precision.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One N(0, 1) draw via the polar Box-Muller transform.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let a = 2.0 * self.uniform() - 1.0;
            let b = 2.0 * self.uniform() - 1.0;
            let s = a * a + b * b;
            if s > 0.0 && s < 1.0 {
                let f = libm::sqrt(-2.0 * libm::log(s) / s);
                self.spare = Some(b * f);
                return a * f;
            }
        }
    }
}
