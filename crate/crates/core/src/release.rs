//! The private release step shared by both pipelines: perturb per-bin counts
//! with `Lap(2/eps)`, filter below the threshold `t`, and emit the surviving
//! (center, weight) pairs. Empty bins are released either explicitly (one
//! noise draw per bin) or implicitly (a binomial survivor count plus
//! tail-conditioned weights); the two are distributionally equivalent.

use serde::{Deserialize, Serialize};

use crate::grid::{enumerate_empty_bin_centers, grid_assign, BinCount, GridConfig};
use crate::noise::{binomial, conditional_laplace, laplace, laplace_tail, RunRng, Stream};
use crate::tree::{adaptive_binning_with_box, implicit_empty_leaves, leaf_bins, TreeConfig};
use crate::types::{bounding_box, Bin, Dataset, Point, WeightedDataset};
use crate::{Error, Result};

/// Budget split of a release: `epsilon_partition` for the (optional)
/// adaptive partitioning stage and `epsilon_release` for count perturbation.
/// The composed output is `(epsilon_partition + epsilon_release)`-DP.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PrivacySpec {
    pub epsilon_partition: f64,
    pub epsilon_release: f64,
    pub threshold: f64,
}

impl PrivacySpec {
    pub fn new(epsilon_partition: f64, epsilon_release: f64, threshold: f64) -> Result<Self> {
        if !epsilon_partition.is_finite() || epsilon_partition < 0.0 {
            return Err(Error::invalid("epsilon_partition must be >= 0"));
        }
        if !epsilon_release.is_finite() || epsilon_release <= 0.0 {
            return Err(Error::invalid("epsilon_release must be > 0"));
        }
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::invalid("threshold must be >= 0"));
        }
        Ok(PrivacySpec {
            epsilon_partition,
            epsilon_release,
            threshold,
        })
    }

    pub fn total_epsilon(&self) -> f64 {
        self.epsilon_partition + self.epsilon_release
    }

    fn release_scale(&self) -> f64 {
        2.0 / self.epsilon_release
    }
}

/// Internal budget-accounting device: sums the per-query privacy cost
/// (sensitivity / noise scale) actually spent. An assertion aid, not a
/// runtime DP proof.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Ledger {
    pub entries: Vec<LedgerEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub label: String,
    pub epsilon: f64,
}

impl Ledger {
    pub fn charge(&mut self, label: &str, epsilon: f64) {
        self.entries.push(LedgerEntry {
            label: label.into(),
            epsilon,
        });
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.epsilon).sum()
    }
}

/// Perturb and filter the nonempty bins: weight = count + Lap(2/eps''),
/// zeroed below `t`, emitted if positive.
pub fn release_nonempty(
    bins: &[Bin],
    spec: &PrivacySpec,
    rng: &mut Stream,
) -> Result<WeightedDataset> {
    let scale = spec.release_scale();
    let mut entries = Vec::new();
    let mut dim = 0;
    for bin in bins {
        dim = bin.center.dim();
        let noisy = bin.count as f64 + laplace(scale, rng)?;
        if noisy >= spec.threshold && noisy > 0.0 {
            entries.push((bin.center.clone(), noisy));
        }
    }
    WeightedDataset::new(entries, if bins.is_empty() { 0 } else { dim })
}

/// Explicit empty-bin release: one `Lap(2/eps'')` draw per center, kept iff
/// it clears the threshold (and is positive, which matters only at `t = 0`:
/// each empty bin then survives with probability exactly 1/2).
pub fn release_empty_explicit(
    centers: &[Point],
    spec: &PrivacySpec,
    rng: &mut Stream,
) -> Result<WeightedDataset> {
    let scale = spec.release_scale();
    let mut entries = Vec::new();
    let mut dim = 0;
    for c in centers {
        dim = c.dim();
        let eta = laplace(scale, rng)?;
        if eta >= spec.threshold && eta > 0.0 {
            entries.push((c.clone(), eta));
        }
    }
    WeightedDataset::new(entries, if centers.is_empty() { 0 } else { dim })
}

// Expected survivor counts above this are refused rather than materialized.
const MAX_EXPECTED_SURVIVORS: f64 = 1e8;

/// Implicit empty-bin release over `empty_count` bins: draw the number of
/// survivors `m ~ Binom(K, Pr[Lap >= t])`, ask `sample_centers` for `m`
/// distinct uniform centers, and weight each by a `Lap(2/eps'')` draw
/// conditioned on clearing the threshold.
///
/// When `K` exceeds exact binomial range the survivor count falls back to a
/// Poisson with the same mean (total-variation error at most the per-bin
/// survival probability).
pub fn release_empty_implicit(
    empty_count: BinCount,
    spec: &PrivacySpec,
    rng: &mut Stream,
    sample_centers: impl FnOnce(u64) -> Result<Vec<Point>>,
) -> Result<WeightedDataset> {
    let scale = spec.release_scale();
    // At t = 0 a surviving draw must still be positive; the conditional
    // sampler's support is (t, inf) either way, so tail at t is the survival
    // probability exactly.
    let p = laplace_tail(scale, spec.threshold);
    let m = match empty_count {
        BinCount::Exact(k) if k == 0 => 0,
        BinCount::Exact(k) if k <= u64::MAX as u128 => binomial(k as u64, p, rng)?,
        huge => {
            let log_lambda = huge.log2() * std::f64::consts::LN_2 + p.ln();
            let lambda = log_lambda.exp();
            if !(lambda <= MAX_EXPECTED_SURVIVORS) {
                return Err(Error::Infeasible(format!(
                    "expected surviving empty bins e^{log_lambda:.1} too large to materialize"
                )));
            }
            use rand_distr::Distribution;
            let poisson = rand_distr::Poisson::new(lambda.max(f64::MIN_POSITIVE))
                .map_err(|e| Error::invalid(format!("poisson: {e}")))?;
            poisson.sample(rng) as u64
        }
    };
    if m == 0 {
        return WeightedDataset::new(Vec::new(), 0);
    }
    let centers = sample_centers(m)?;
    let mut entries = Vec::with_capacity(centers.len());
    let dim = centers.first().map_or(0, Point::dim);
    for c in centers {
        entries.push((c, conditional_laplace(scale, spec.threshold, rng)?));
    }
    WeightedDataset::new(entries, dim)
}

fn union(a: WeightedDataset, b: WeightedDataset) -> Result<WeightedDataset> {
    let dim = if a.is_empty() { b.dim() } else { a.dim() };
    let mut entries: Vec<(Point, f64)> = a.entries().to_vec();
    entries.extend(b.entries().iter().cloned());
    WeightedDataset::new(entries, dim)
}

/// Bin statistics of a synthesis run, for manifests and bound evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthStats {
    pub n: u64,
    /// number of t/2-heavy bins
    pub heavy_bins: u64,
    /// number of points in 3t/2-light bins
    pub light_points: u64,
    /// log2 of the total bin count J (exact J may not fit any integer)
    pub log2_total_bins: f64,
    pub nonempty_bins: u64,
    pub released_bins: u64,
    pub released_empty_bins: u64,
    pub h: Option<u32>,
    pub h_prime: Option<u32>,
}

/// A released synthetic dataset with its budget ledger and statistics.
#[derive(Debug, Clone)]
pub struct SynthReport {
    pub output: WeightedDataset,
    pub ledger: Ledger,
    pub stats: SynthStats,
}

/// End-to-end data-independent pipeline: regular grid, noisy counts, implicit
/// empty-bin release. The full budget is spent on the counts.
pub fn synthesize_data_independent(
    data: &Dataset,
    config: &GridConfig,
    rng: &RunRng,
) -> Result<SynthReport> {
    let spec = PrivacySpec::new(0.0, config.epsilon, config.threshold)?;
    let bounding = bounding_box(data)?;
    let grid = grid_assign(data, &bounding, config.bin_width)?;
    let nonempty = grid.nonempty_bins();

    let released = release_nonempty(&nonempty, &spec, &mut rng.stream("release/nonempty"))?;
    let mut empty_pick = rng.stream("release/empty-pick");
    let released_empty = release_empty_implicit(
        grid.empty_bins(),
        &spec,
        &mut rng.stream("release/empty-noise"),
        |m| enumerate_empty_bin_centers(&grid, m, &mut empty_pick),
    )?;

    let mut ledger = Ledger::default();
    ledger.charge("noisy-histogram", config.epsilon);

    let (heavy, light) = count_heavy_light(&nonempty, config.threshold);
    let stats = SynthStats {
        n: data.len() as u64,
        heavy_bins: heavy,
        light_points: light,
        log2_total_bins: grid.total_bins().log2(),
        nonempty_bins: nonempty.len() as u64,
        released_bins: released.len() as u64,
        released_empty_bins: released_empty.len() as u64,
        h: None,
        h_prime: None,
    };
    Ok(SynthReport {
        output: union(released, released_empty)?,
        ledger,
        stats,
    })
}

/// End-to-end data-dependent pipeline: adaptive partitioning under
/// `eps'`, then the same noisy release under `eps''` over the leaves,
/// with empty leaves handled implicitly. Output is `(eps' + eps'')`-DP.
pub fn synthesize_data_dependent(
    data: &Dataset,
    config: &TreeConfig,
    epsilon_release: f64,
    threshold: f64,
    rng: &RunRng,
) -> Result<SynthReport> {
    let spec = PrivacySpec::new(config.epsilon_prime, epsilon_release, threshold)?;
    let bounding = bounding_box(data)?;
    let tree = adaptive_binning_with_box(data, config, &bounding, rng)?;
    let leaves = leaf_bins(&tree);

    let released = release_nonempty(&leaves, &spec, &mut rng.stream("release/nonempty"))?;
    let empties = implicit_empty_leaves(&tree)?;
    let mut empty_pick = rng.stream("release/empty-pick");
    let released_empty = release_empty_implicit(
        empties.count_as_bincount(),
        &spec,
        &mut rng.stream("release/empty-noise"),
        |m| {
            Ok(empties
                .sample(m, &mut empty_pick)?
                .into_iter()
                .map(|b| b.center)
                .collect())
        },
    )?;

    let mut ledger = Ledger::default();
    // each root-to-leaf path takes at most (h' - h) noisy decisions at scale
    // 2(h' - h)/eps'; sequential composition along the worst path
    ledger.charge("partitioning", config.epsilon_prime);
    ledger.charge("noisy-histogram", epsilon_release);

    let (heavy, light) = count_heavy_light(&leaves, threshold);
    let total_bins = (leaves.len() as u128 + empties.count()) as f64;
    let stats = SynthStats {
        n: data.len() as u64,
        heavy_bins: heavy,
        light_points: light,
        log2_total_bins: total_bins.log2(),
        nonempty_bins: leaves.len() as u64,
        released_bins: released.len() as u64,
        released_empty_bins: released_empty.len() as u64,
        h: Some(tree.h()),
        h_prime: Some(tree.h_prime()),
    };
    Ok(SynthReport {
        output: union(released, released_empty)?,
        ledger,
        stats,
    })
}

/// Diagnostic on the sensitive side (never released): `M` = number of bins
/// with count >= t/2, `m` = number of points in bins with count < 3t/2.
pub fn count_heavy_light(bins: &[Bin], t: f64) -> (u64, u64) {
    let heavy = bins.iter().filter(|b| b.count as f64 >= t / 2.0).count() as u64;
    let light: u64 = bins
        .iter()
        .filter(|b| (b.count as f64) < 1.5 * t)
        .map(|b| b.count)
        .sum();
    (heavy, light)
}

/// The threshold `t = (8/eps) ln(1/delta)`.
pub fn threshold_for_delta(epsilon: f64, delta: f64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must be in (0, 1)"));
    }
    Ok(8.0 / epsilon * (1.0 / delta).ln())
}

/// The threshold `t = 8 c ln(n) / eps` (the `delta = n^{-c}` parameterization).
pub fn threshold_for_log_n(epsilon: f64, c: f64, n: u64) -> Result<f64> {
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid("c must be > 0"));
    }
    if n < 2 {
        return Err(Error::invalid("n must be >= 2"));
    }
    Ok(8.0 * c * (n as f64).ln() / epsilon)
}
