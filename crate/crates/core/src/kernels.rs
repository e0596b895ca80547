//! Gaussian kernel, kernel density, weighted MMD, and the closed-form MMD
//! between a standard Gaussian and a sample.
//!
//! The sup-norm KD distance is approximated on a finite evaluation net; a
//! default net (supports of both datasets plus quasi-random fill) is provided
//! by [`default_eval_net`]. KD differences are Lipschitz in the query, so a
//! dense net lower-bounds the true sup tightly.

use crate::types::{bounding_box, Dataset, Point, WeightedDataset};
use crate::{Error, Result};

/// Gaussian kernel bandwidth sigma in `K(x,p) = exp(-||x-p||^2 / (2 sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    bandwidth: f64,
}

impl KernelParams {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !bandwidth.is_finite() || bandwidth <= 0.0 {
            return Err(Error::invalid("kernel bandwidth must be > 0"));
        }
        Ok(KernelParams { bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams { bandwidth: 1.0 }
    }
}

/// `exp(-||x-y||^2 / (2 sigma^2))`, in [0, 1].
pub fn kernel(x: &Point, y: &Point, params: &KernelParams) -> Result<f64> {
    let sq = x.squared_distance(y)?;
    Ok((-sq / (2.0 * params.bandwidth * params.bandwidth)).exp())
}

fn kernel_sq(sq_dist: f64, params: &KernelParams) -> f64 {
    (-sq_dist / (2.0 * params.bandwidth * params.bandwidth)).exp()
}

/// Weight-normalized kernel density at `query`.
pub fn kde(query: &Point, data: &WeightedDataset, params: &KernelParams) -> Result<f64> {
    let total = data.total_weight();
    if total <= 0.0 {
        return Err(Error::invalid("kde requires positive total weight"));
    }
    let mut acc = 0.0;
    for (p, w) in data.entries() {
        acc += w * kernel(query, p, params)?;
    }
    Ok(acc / total)
}

/// Max over `eval_points` of the KD difference: a finite proxy for the
/// sup-norm distance between the two densities.
pub fn kde_sup_distance(
    p: &WeightedDataset,
    q: &WeightedDataset,
    eval_points: &[Point],
    params: &KernelParams,
) -> Result<f64> {
    if eval_points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut sup: f64 = 0.0;
    for x in eval_points {
        let diff = (kde(x, p, params)? - kde(x, q, params)?).abs();
        sup = sup.max(diff);
    }
    Ok(sup)
}

/// Kernel metric between two weighted datasets:
/// the normalized-weight average of `K(p, q)` over all pairs.
pub fn kappa(p: &WeightedDataset, q: &WeightedDataset, params: &KernelParams) -> Result<f64> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyInput);
    }
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let (wp, wq) = (p.total_weight(), q.total_weight());
    let mut acc = 0.0;
    for (a, wa) in p.entries() {
        let ac = a.coords();
        let mut row = 0.0;
        for (b, wb) in q.entries() {
            let sq: f64 = ac
                .iter()
                .zip(b.coords())
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            row += wb * kernel_sq(sq, params);
        }
        acc += wa * row;
    }
    Ok(acc / (wp * wq))
}

/// Biased (V-statistic) MMD: `sqrt(k(P,P) + k(Q,Q) - 2 k(P,Q))` with
/// normalized weights. Invariant under rescaling either dataset's weights.
pub fn mmd(p: &WeightedDataset, q: &WeightedDataset, params: &KernelParams) -> Result<f64> {
    let v = kappa(p, p, params)? + kappa(q, q, params)? - 2.0 * kappa(p, q, params)?;
    // Floating-point reassociation can push an exact zero slightly negative.
    Ok(v.max(0.0).sqrt())
}

/// Unbiased squared MMD between `N(0, I_d)` and the sample, evaluated in
/// closed form. May be slightly negative (unbiased estimator; not clamped).
pub fn mmd_vs_standard_gaussian(sample: &Dataset, params: &KernelParams) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::invalid(
            "closed-form MMD needs a sample of size >= 2",
        ));
    }
    let d = sample.dim() as f64;
    let g2 = params.bandwidth * params.bandwidth;
    let term1 = (g2 / (2.0 + g2)).powf(d / 2.0);

    let mut cross = 0.0;
    for z in sample.points() {
        let sq: f64 = z.coords().iter().map(|c| c * c).sum();
        cross += (-sq / (2.0 * (1.0 + g2))).exp();
    }
    let term2 = (2.0 / n as f64) * (g2 / (1.0 + g2)).powf(d / 2.0) * cross;

    let mut pair = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let sq = sample.points()[i]
                .squared_distance(&sample.points()[j])
                .expect("same dataset");
            pair += (-sq / (2.0 * g2)).exp();
        }
    }
    let term3 = pair / (n as f64 * (n - 1) as f64);

    Ok(term1 - term2 + term3)
}

/// Closed-form (biased) MMD between `N(0, I_d)` and a weighted discrete
/// distribution: all Gaussian expectations are evaluated exactly.
pub fn mmd_weighted_vs_standard_gaussian(
    q: &WeightedDataset,
    params: &KernelParams,
) -> Result<f64> {
    if q.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = q.dim() as f64;
    let g2 = params.bandwidth * params.bandwidth;
    let term_pp = (g2 / (2.0 + g2)).powf(d / 2.0);

    let total = q.total_weight();
    let mut cross = 0.0;
    for (x, w) in q.entries() {
        let sq: f64 = x.coords().iter().map(|c| c * c).sum();
        cross += w * (-sq / (2.0 * (1.0 + g2))).exp();
    }
    let term_pq = (g2 / (1.0 + g2)).powf(d / 2.0) * cross / total;

    let term_qq = kappa(q, q, params)?;
    Ok((term_pp - 2.0 * term_pq + term_qq).max(0.0).sqrt())
}

const HALTON_BASES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn halton(index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Default evaluation net for the sup-norm proxy: the union of both supports
/// plus `n_fill` Halton points spread over the joint bounding box.
pub fn default_eval_net(
    p: &WeightedDataset,
    q: &WeightedDataset,
    n_fill: usize,
) -> Result<Vec<Point>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: q.dim(),
        });
    }
    let d = p.dim();
    if d > HALTON_BASES.len() {
        return Err(Error::invalid(format!(
            "default eval net supports dim <= {}",
            HALTON_BASES.len()
        )));
    }
    let mut net: Vec<Point> = Vec::with_capacity(p.len() + q.len() + n_fill);
    let mut support_rows: Vec<Point> = Vec::new();
    for (pt, _) in p.entries().iter().chain(q.entries()) {
        net.push(pt.clone());
        support_rows.push(pt.clone());
    }
    let support = Dataset::new(support_rows)?;
    let bx = bounding_box(&support)?;
    for k in 0..n_fill {
        let coords: Vec<f64> = (0..d)
            .map(|i| bx.low(i) + halton(k as u64 + 1, HALTON_BASES[i]) * bx.edge())
            .collect();
        net.push(Point::new(coords)?);
    }
    Ok(net)
}
