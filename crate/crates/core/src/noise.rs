//! Randomness primitives: Laplace noise, its exact tail, tail-conditioned
//! Laplace sampling, and binomial draws for implicit empty-bin selection.
//!
//! One seedable [`RunRng`] per run is forked into independent named streams
//! (partitioning noise, release noise, empty-bin sampling) so that enabling
//! or disabling implicit sampling does not perturb the other streams.
//!
//! Caveat: these are plain floating-point samplers. They do not defend
//! against the known floating-point attacks on the Laplace mechanism; that
//! hardening is out of scope here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Binomial, Distribution};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Deterministic per-seed stream of randomness.
pub type Stream = ChaCha20Rng;

/// Root randomness for a run. Forking by label (or by tree path) yields
/// independent deterministic streams.
#[derive(Debug, Clone, Copy)]
pub struct RunRng {
    seed: u64,
}

impl RunRng {
    pub fn new(seed: u64) -> Self {
        RunRng { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream derived from the run seed and a label.
    pub fn stream(&self, label: &str) -> Stream {
        let mut hasher = Sha256::new();
        hasher.update(self.seed.to_le_bytes());
        hasher.update(label.as_bytes());
        let digest = hasher.finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest);
        ChaCha20Rng::from_seed(seed)
    }
}

/// Uniform in the open interval (0, 1).
fn uniform_open(rng: &mut impl Rng) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

/// Sample from Laplace(0, scale) by exact inverse-CDF (no clipping).
pub fn laplace(scale: f64, rng: &mut impl Rng) -> Result<f64> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::invalid("laplace scale must be > 0"));
    }
    // u in (-1/2, 1/2]
    let u = 0.5 - uniform_open(rng);
    if u >= 0.0 {
        Ok(-scale * (1.0 - 2.0 * u).ln())
    } else {
        Ok(scale * (1.0 + 2.0 * u).ln())
    }
}

/// Exact `Pr[Lap(0, scale) >= alpha]`.
pub fn laplace_tail(scale: f64, alpha: f64) -> f64 {
    debug_assert!(scale > 0.0);
    if alpha >= 0.0 {
        0.5 * (-alpha / scale).exp()
    } else {
        1.0 - 0.5 * (alpha / scale).exp()
    }
}

/// Sample `X ~ Lap(0, scale)` conditioned on `X >= threshold`.
///
/// For a nonnegative threshold the conditional tail is exponential
/// (memorylessness), so the sample is `threshold + Exp(mean = scale)`.
/// For a negative threshold we invert the CDF restricted to the tail.
pub fn conditional_laplace(scale: f64, threshold: f64, rng: &mut impl Rng) -> Result<f64> {
    if !scale.is_finite() || scale <= 0.0 {
        return Err(Error::invalid("laplace scale must be > 0"));
    }
    if threshold >= 0.0 {
        let u = uniform_open(rng);
        return Ok(threshold - scale * u.ln());
    }
    // Laplace CDF at t < 0 is (1/2) e^{t/scale}.
    let cdf_t = 0.5 * (threshold / scale).exp();
    let u = cdf_t + rng.random::<f64>() * (1.0 - cdf_t);
    if u < 0.5 {
        Ok(scale * (2.0 * u).ln())
    } else {
        Ok(-scale * (2.0 * (1.0 - u)).ln())
    }
}

/// Exact binomial sample.
pub fn binomial(n_trials: u64, p: f64, rng: &mut impl Rng) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid("binomial p must be in [0, 1]"));
    }
    if n_trials == 0 || p == 0.0 {
        return Ok(0);
    }
    if p == 1.0 {
        return Ok(n_trials);
    }
    let dist = Binomial::new(n_trials, p)
        .map_err(|e| Error::invalid(format!("binomial parameters: {e}")))?;
    Ok(dist.sample(rng))
}
