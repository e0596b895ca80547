//! Ground-truth generators for experiments: spherical Gaussian mixtures and
//! the optimal mixture-of-uniforms proxy for a 1-d standard Gaussian,
//! together with its closed-form KL divergence.

use rand_distr::weighted::WeightedIndex;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::noise::Stream;
use crate::types::{Dataset, Point, WeightedDataset};
use crate::{Error, Result};

/// A mixture of spherical Gaussians with shared per-coordinate std.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianMixtureSpec {
    pub dim: usize,
    pub mixing_weights: Vec<f64>,
    pub means: Vec<Point>,
    pub component_sigma: f64,
}

impl GaussianMixtureSpec {
    pub fn new(
        dim: usize,
        mixing_weights: Vec<f64>,
        means: Vec<Point>,
        component_sigma: f64,
    ) -> Result<Self> {
        if mixing_weights.is_empty() || mixing_weights.len() != means.len() {
            return Err(Error::invalid(
                "need equally many mixing weights and means",
            ));
        }
        if mixing_weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("mixing weights must be positive"));
        }
        let total: f64 = mixing_weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("mixing weights must sum to 1"));
        }
        for m in &means {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
        }
        if !component_sigma.is_finite() || component_sigma <= 0.0 {
            return Err(Error::invalid("component sigma must be > 0"));
        }
        Ok(GaussianMixtureSpec {
            dim,
            mixing_weights,
            means,
            component_sigma,
        })
    }

    pub fn n_components(&self) -> usize {
        self.means.len()
    }

    /// The standard experimental recipe in `dim` dimensions: 10 components,
    /// mixing weights proportional to (1, 1/2, ..., 1/10), means drawn from
    /// a spherical Gaussian centered at (100, ..., 100) with per-coordinate
    /// variance 200, component std 30. Means are drawn once from `rng` and
    /// frozen into the spec so runs can be reproduced exactly.
    pub fn standard_recipe(dim: usize, rng: &mut Stream) -> Result<Self> {
        let raw: Vec<f64> = (1..=10).map(|i| 1.0 / i as f64).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mean_dist = Normal::new(100.0, 200.0_f64.sqrt())
            .map_err(|e| Error::invalid(format!("normal: {e}")))?;
        let means: Vec<Point> = (0..10)
            .map(|_| Point::new((0..dim).map(|_| mean_dist.sample(rng)).collect()))
            .collect::<Result<_>>()?;
        GaussianMixtureSpec::new(dim, weights, means, 30.0)
    }

    /// Mixture mean, `sum_j w_j mu_j`.
    pub fn mean(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (w, m) in self.mixing_weights.iter().zip(&self.means) {
            for (o, c) in out.iter_mut().zip(m.coords()) {
                *o += w * c;
            }
        }
        out
    }
}

/// `n` i.i.d. draws: a component per categorical(weights), then a spherical
/// Gaussian around its mean.
pub fn sample_gaussian_mixture(
    spec: &GaussianMixtureSpec,
    n: usize,
    rng: &mut Stream,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let component = WeightedIndex::new(&spec.mixing_weights)
        .map_err(|e| Error::invalid(format!("mixing weights: {e}")))?;
    let noise = Normal::new(0.0, spec.component_sigma)
        .map_err(|e| Error::invalid(format!("normal: {e}")))?;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let j = component.sample(rng);
        let row: Vec<f64> = spec.means[j]
            .coords()
            .iter()
            .map(|c| c + noise.sample(rng))
            .collect();
        rows.push(row);
    }
    Dataset::from_rows(rows)
}

/// A symmetric 1-d mixture of `2k+1` uniform boxes of width `2c`, box `i`
/// centered at `2ci` for `i` in `[-k, k]`. Weights are stored for
/// `i = -k..=k` in order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformMixtureSpec {
    pub k: u32,
    pub half_width: f64,
    pub weights: Vec<f64>,
}

impl UniformMixtureSpec {
    pub fn new(k: u32, half_width: f64, weights: Vec<f64>) -> Result<Self> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::invalid("half width must be > 0"));
        }
        let len = 2 * k as usize + 1;
        if weights.len() != len {
            return Err(Error::invalid(format!("need {len} weights")));
        }
        if weights.iter().any(|w| !w.is_finite() || *w <= 0.0) {
            return Err(Error::invalid("weights must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("weights must sum to 1"));
        }
        for i in 0..=k as usize {
            let lo = weights[k as usize - i];
            let hi = weights[k as usize + i];
            if (lo - hi).abs() > 1e-12 {
                return Err(Error::invalid("weights must be symmetric"));
            }
        }
        Ok(UniformMixtureSpec {
            k,
            half_width,
            weights,
        })
    }

    /// Weight of box `i`, for `i` in `[-k, k]`.
    pub fn weight(&self, i: i64) -> f64 {
        self.weights[(i + self.k as i64) as usize]
    }

    /// Center of box `i`: `2 c i`.
    pub fn center(&self, i: i64) -> f64 {
        2.0 * self.half_width * i as f64
    }
}

/// The KL-optimal box weights against a standard Gaussian:
/// `w_0 = 1 / (1 + 2 sum_{i=1}^k e^{-2 i^2 c^2})`, `w_i = w_0 e^{-2 i^2 c^2}`.
pub fn optimal_uniform_weights(k: u32, c: f64) -> Result<UniformMixtureSpec> {
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::invalid("half width must be > 0"));
    }
    let tail: f64 = (1..=k as i64)
        .map(|i| (-2.0 * (i * i) as f64 * c * c).exp())
        .sum();
    let w0 = 1.0 / (1.0 + 2.0 * tail);
    let weights: Vec<f64> = (-(k as i64)..=k as i64)
        .map(|i| w0 * (-2.0 * (i * i) as f64 * c * c).exp())
        .collect();
    UniformMixtureSpec::new(k, c, weights)
}

/// Closed-form `D_KL(Q || P)` of the uniform mixture `Q` against the standard
/// Gaussian `P`:
/// `sum_i w_i log(w_i / 2c) + (1/2) log(2 pi) + sum_i (w_i c^2 / 6)(12 i^2 + 1)`.
pub fn kl_uniform_mixture_vs_gaussian(spec: &UniformMixtureSpec) -> f64 {
    let c = spec.half_width;
    let mut entropy_term = 0.0;
    let mut moment_term = 0.0;
    for i in -(spec.k as i64)..=spec.k as i64 {
        let w = spec.weight(i);
        entropy_term += w * (w / (2.0 * c)).ln();
        moment_term += w * c * c / 6.0 * (12.0 * (i * i) as f64 + 1.0);
    }
    entropy_term + 0.5 * std::f64::consts::TAU.ln() + moment_term
}

/// The mixture collapsed to weighted box centers: `2k+1` entries at `2ci`
/// with weights `w_i`. This is the synthetic-data proxy whose MMD against
/// the Gaussian the width sweep optimizes.
pub fn uniform_mixture_as_weighted_dataset(spec: &UniformMixtureSpec) -> Result<WeightedDataset> {
    let entries: Vec<(Point, f64)> = (-(spec.k as i64)..=spec.k as i64)
        .map(|i| Ok((Point::new(vec![spec.center(i)])?, spec.weight(i))))
        .collect::<Result<_>>()?;
    WeightedDataset::new(entries, 1)
}
