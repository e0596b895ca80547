//! Data-independent partitioning: a regular grid over the bounding hypercube,
//! sparse point counting, and implicit handling of empty bins.
//!
//! Empty bins are never materialized; the grid stores only nonempty cells,
//! and empty-bin centers are produced by rejection sampling of per-axis
//! indices. The total bin count `J = bins_per_axis^d` is kept exactly when it
//! fits an integer and as `log2(J)` otherwise, so the implicit machinery
//! works when `J` is astronomically large.

use std::collections::{BTreeMap, HashSet};

use rand::Rng;

use crate::types::{Bin, BoundingBox, Dataset, Point};
use crate::{Error, Result};

/// Parameters of the data-independent pipeline.
#[derive(Debug, Clone, Copy)]
pub struct GridConfig {
    pub bin_width: f64,
    pub epsilon: f64,
    pub threshold: f64,
}

impl GridConfig {
    pub fn new(bin_width: f64, epsilon: f64, threshold: f64) -> Result<Self> {
        if !bin_width.is_finite() || bin_width <= 0.0 {
            return Err(Error::invalid("bin width must be > 0"));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::invalid("epsilon must be > 0"));
        }
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::invalid("threshold must be >= 0"));
        }
        Ok(GridConfig {
            bin_width,
            epsilon,
            threshold,
        })
    }
}

/// A bin count that may exceed any integer type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinCount {
    Exact(u128),
    /// `log2` of the count, for grids too large to enumerate.
    Log2(f64),
}

impl BinCount {
    pub fn log2(&self) -> f64 {
        match self {
            BinCount::Exact(n) => (*n as f64).log2(),
            BinCount::Log2(l) => *l,
        }
    }

    pub fn as_exact(&self) -> Option<u128> {
        match self {
            BinCount::Exact(n) => Some(*n),
            BinCount::Log2(_) => None,
        }
    }
}

/// Sparse per-bin counts over a regular grid.
#[derive(Debug, Clone)]
pub struct GridCounts {
    bounding: BoundingBox,
    width: f64,
    bins_per_axis: u64,
    nonempty: BTreeMap<Vec<u64>, u64>,
}

impl GridCounts {
    pub fn bounding(&self) -> &BoundingBox {
        &self.bounding
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn bins_per_axis(&self) -> u64 {
        self.bins_per_axis
    }

    pub fn dim(&self) -> usize {
        self.bounding.dim()
    }

    pub fn nonempty(&self) -> &BTreeMap<Vec<u64>, u64> {
        &self.nonempty
    }

    pub fn total_points(&self) -> u64 {
        self.nonempty.values().sum()
    }

    /// `J = bins_per_axis^d`.
    pub fn total_bins(&self) -> BinCount {
        let d = self.dim() as u32;
        match (self.bins_per_axis as u128).checked_pow(d) {
            Some(j) => BinCount::Exact(j),
            None => BinCount::Log2(d as f64 * (self.bins_per_axis as f64).log2()),
        }
    }

    /// Number of empty bins. In the overflow regime the nonempty cells are a
    /// vanishing correction to `J` and the log-scale count is returned as is.
    pub fn empty_bins(&self) -> BinCount {
        match self.total_bins() {
            BinCount::Exact(j) => BinCount::Exact(j - self.nonempty.len() as u128),
            log => log,
        }
    }

    pub fn center_of(&self, index: &[u64]) -> Point {
        let coords: Vec<f64> = index
            .iter()
            .enumerate()
            .map(|(i, &idx)| self.bounding.low(i) + (idx as f64 + 0.5) * self.width)
            .collect();
        Point::new(coords).expect("grid centers are finite")
    }

    /// Nonempty bins in deterministic (index) order.
    pub fn nonempty_bins(&self) -> Vec<Bin> {
        self.nonempty
            .iter()
            .map(|(idx, &count)| {
                Bin::new(
                    self.center_of(idx),
                    vec![self.width; self.dim()],
                    count,
                )
                .expect("grid bin geometry is valid")
            })
            .collect()
    }
}

/// Assign each point to a grid cell of width `width` over `bounding`.
///
/// Index convention: `floor((p_i - low_i) / width)` with closed-left,
/// open-right intervals; points on the box's upper face are clamped into the
/// last bin. Bin geometry depends only on `(bounding, width)`, never on the
/// points.
pub fn grid_assign(data: &Dataset, bounding: &BoundingBox, width: f64) -> Result<GridCounts> {
    if !width.is_finite() || width <= 0.0 {
        return Err(Error::invalid("bin width must be > 0"));
    }
    if bounding.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounding.dim(),
            got: data.dim(),
        });
    }
    let bins_per_axis = (bounding.edge() / width).ceil().max(1.0) as u64;
    let mut nonempty: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for (i, p) in data.points().iter().enumerate() {
        if !bounding.contains(p) {
            return Err(Error::PointOutsideBox { index: i });
        }
        let idx: Vec<u64> = p
            .coords()
            .iter()
            .enumerate()
            .map(|(axis, &c)| {
                let raw = ((c - bounding.low(axis)) / width).floor();
                (raw.max(0.0) as u64).min(bins_per_axis - 1)
            })
            .collect();
        *nonempty.entry(idx).or_insert(0) += 1;
    }
    Ok(GridCounts {
        bounding: bounding.clone(),
        width,
        bins_per_axis,
        nonempty,
    })
}

/// L1 distance between the count vectors of two replacement-neighbor
/// datasets. Always <= 2 by construction; this is the sensitivity certificate
/// behind the `Lap(2/eps)` noise scale.
pub fn count_vector_l1_sensitivity_check(
    data: &Dataset,
    neighbor: &Dataset,
    bounding: &BoundingBox,
    width: f64,
) -> Result<f64> {
    if data.len() != neighbor.len() {
        return Err(Error::NotNeighbors(
            "replacement neighbors must have equal size".into(),
        ));
    }
    let differing = data
        .points()
        .iter()
        .zip(neighbor.points())
        .filter(|(a, b)| a != b)
        .count();
    if differing > 1 {
        return Err(Error::NotNeighbors(format!(
            "{differing} rows differ, expected at most 1"
        )));
    }
    let a = grid_assign(data, bounding, width)?;
    let b = grid_assign(neighbor, bounding, width)?;
    let mut keys: HashSet<&Vec<u64>> = a.nonempty.keys().collect();
    keys.extend(b.nonempty.keys());
    let mut l1 = 0.0;
    for k in keys {
        let ca = *a.nonempty.get(k).unwrap_or(&0) as f64;
        let cb = *b.nonempty.get(k).unwrap_or(&0) as f64;
        l1 += (ca - cb).abs();
    }
    Ok(l1)
}

// Below this grid size the sampler enumerates empty cells instead of
// rejection sampling, which stays fast when the request nearly exhausts them.
const ENUMERATION_LIMIT: u128 = 1 << 20;

/// Uniformly sample `how_many` distinct empty-bin centers without
/// materializing the grid. Memory is O(nonempty + how_many).
pub fn enumerate_empty_bin_centers(
    grid: &GridCounts,
    how_many: u64,
    rng: &mut impl Rng,
) -> Result<Vec<Point>> {
    if how_many == 0 {
        return Ok(Vec::new());
    }
    if let BinCount::Exact(available) = grid.empty_bins() {
        if u128::from(how_many) > available {
            return Err(Error::NotEnoughEmptyBins {
                requested: u128::from(how_many),
                available,
            });
        }
        if let BinCount::Exact(j) = grid.total_bins() {
            if j <= ENUMERATION_LIMIT {
                return sample_by_enumeration(grid, how_many as usize, rng);
            }
        }
    }
    let d = grid.dim();
    let mut chosen: HashSet<Vec<u64>> = HashSet::with_capacity(how_many as usize);
    let mut out = Vec::with_capacity(how_many as usize);
    while out.len() < how_many as usize {
        let idx: Vec<u64> = (0..d)
            .map(|_| rng.random_range(0..grid.bins_per_axis))
            .collect();
        if grid.nonempty.contains_key(&idx) || chosen.contains(&idx) {
            continue;
        }
        out.push(grid.center_of(&idx));
        chosen.insert(idx);
    }
    Ok(out)
}

fn sample_by_enumeration(
    grid: &GridCounts,
    how_many: usize,
    rng: &mut impl Rng,
) -> Result<Vec<Point>> {
    let d = grid.dim();
    let mut empties: Vec<Vec<u64>> = Vec::new();
    let mut idx = vec![0u64; d];
    loop {
        if !grid.nonempty.contains_key(&idx) {
            empties.push(idx.clone());
        }
        // mixed-radix increment
        let mut axis = d;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < grid.bins_per_axis {
                break;
            }
            idx[axis] = 0;
            if axis == 0 {
                axis = d; // carried past the most significant digit: done
                break;
            }
        }
        if axis == d {
            break;
        }
    }
    // partial Fisher-Yates for the first `how_many` slots
    for i in 0..how_many {
        let j = rng.random_range(i..empties.len());
        empties.swap(i, j);
    }
    Ok(empties[..how_many].iter().map(|i| grid.center_of(i)).collect())
}
