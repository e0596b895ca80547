//! Recursive, privately-decided KD-tree partitioning with a data-independent
//! prefix, plus implicit recovery and sampling of empty leaves.
//!
//! The first `h` levels split unconditionally (no noise, no privacy cost);
//! below that, each split decision compares a noisy count against `tau`, with
//! at most `h' - h` noisy decisions on any root-to-leaf path. With `tau` at
//! or above [`tau_floor`], no empty node is split (w.h.p.), and the set of
//! empty leaves can be reconstructed from the nonempty-leaf paths alone.

use std::collections::HashSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::grid::BinCount;
use crate::noise::{laplace, RunRng};
use crate::types::{bounding_box, Bin, BoundingBox, Dataset, Point};
use crate::{Error, Result};

/// Parameters of the adaptive partitioning stage.
#[derive(Debug, Clone, Copy)]
pub struct TreeConfig {
    /// Privacy budget of the partitioning stage.
    pub epsilon_prime: f64,
    /// Noisy-count threshold controlling recursion.
    pub tau: f64,
    /// Maximum final bin edge: splitting is unconditional above this.
    pub s1: f64,
    /// Minimum final bin edge: no node below this is ever split.
    pub s2: f64,
}

impl TreeConfig {
    pub fn new(epsilon_prime: f64, tau: f64, s1: f64, s2: f64) -> Result<Self> {
        if !epsilon_prime.is_finite() || epsilon_prime <= 0.0 {
            return Err(Error::invalid("epsilon_prime must be > 0"));
        }
        if !tau.is_finite() || tau < 0.0 {
            return Err(Error::invalid("tau must be >= 0"));
        }
        if !(s1.is_finite() && s2.is_finite() && s1 > 0.0 && s2 > 0.0 && s2 < s1) {
            return Err(Error::invalid("edge limits must satisfy 0 < s2 < s1"));
        }
        Ok(TreeConfig {
            epsilon_prime,
            tau,
            s1,
            s2,
        })
    }

    /// Depth budget of the data-dependent part: `ceil(d log2(s1/s2))`.
    pub fn depth_budget(&self, dim: usize) -> u32 {
        (dim as f64 * (self.s1 / self.s2).log2()).ceil() as u32
    }
}

/// A nonempty leaf: its root-to-leaf path (false = left/low child) and exact
/// point count.
#[derive(Debug, Clone, PartialEq)]
pub struct NonEmptyLeaf {
    pub path: Vec<bool>,
    pub count: u64,
}

/// Output of the adaptive partitioning. Only nonempty leaves are stored
/// explicitly; empty leaves are described implicitly (see
/// [`implicit_empty_leaves`]).
#[derive(Debug, Clone)]
pub struct PartitionTree {
    bounding: BoundingBox,
    h: u32,
    h_prime: u32,
    leaves: Vec<NonEmptyLeaf>,
    empty_split_occurred: bool,
    // Explicit bookkeeping kept during the build, used when an empty node was
    // split (Lemma-2 failure) and by test oracles.
    explicit_deep_empty: Vec<Vec<bool>>,
    split_empty_level_h: Vec<Vec<bool>>,
    max_noisy_draws_on_path: u32,
}

impl PartitionTree {
    pub fn bounding(&self) -> &BoundingBox {
        &self.bounding
    }

    pub fn dim(&self) -> usize {
        self.bounding.dim()
    }

    /// Depth of the data-independent prefix.
    pub fn h(&self) -> u32 {
        self.h
    }

    /// Maximum depth.
    pub fn h_prime(&self) -> u32 {
        self.h_prime
    }

    /// Nonempty leaves in left-to-right order.
    pub fn nonempty_leaves(&self) -> &[NonEmptyLeaf] {
        &self.leaves
    }

    /// True if some empty node failed the stop test and was split; the
    /// path-based empty-leaf reconstruction is then invalid and the explicit
    /// fallback is used.
    pub fn empty_split_occurred(&self) -> bool {
        self.empty_split_occurred
    }

    /// Largest number of noisy decisions taken on any root-to-leaf path.
    pub fn max_noisy_draws_on_path(&self) -> u32 {
        self.max_noisy_draws_on_path
    }

    /// Region of the node addressed by `path`: center and per-axis extents.
    pub fn region_of(&self, path: &[bool]) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut center = self.bounding.center().coords().to_vec();
        let mut ext = vec![self.bounding.edge(); d];
        for (depth, &bit) in path.iter().enumerate() {
            let axis = depth % d;
            let w = ext[axis];
            center[axis] += if bit { w / 4.0 } else { -w / 4.0 };
            ext[axis] = w / 2.0;
        }
        (center, ext)
    }

    fn bin_of(&self, path: &[bool], count: u64) -> Bin {
        let (center, ext) = self.region_of(path);
        Bin::new(Point::new(center).expect("finite"), ext, count).expect("valid leaf geometry")
    }

    pub fn to_wire(&self) -> TreeWire {
        TreeWire {
            h: self.h,
            h_prime: self.h_prime,
            bounding: self.bounding.clone(),
            leaves: self
                .leaves
                .iter()
                .map(|l| (path_string(&l.path), l.count))
                .collect(),
        }
    }

    pub fn from_wire(wire: TreeWire) -> Result<Self> {
        let mut leaves = Vec::with_capacity(wire.leaves.len());
        for (s, count) in &wire.leaves {
            let path: Vec<bool> = s
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(Error::invalid(format!("bad path character {c:?}"))),
                })
                .collect::<Result<_>>()?;
            if (path.len() as u32) < wire.h || (path.len() as u32) > wire.h_prime {
                return Err(Error::invalid("leaf path depth outside [h, h']"));
            }
            leaves.push(NonEmptyLeaf {
                path,
                count: *count,
            });
        }
        Ok(PartitionTree {
            bounding: wire.bounding,
            h: wire.h,
            h_prime: wire.h_prime,
            leaves,
            empty_split_occurred: false,
            explicit_deep_empty: Vec::new(),
            split_empty_level_h: Vec::new(),
            max_noisy_draws_on_path: 0,
        })
    }
}

/// Serialized form: the `(h, h', box)` header plus nonempty-leaf paths as
/// bit strings. This is exactly the information needed to recover the empty
/// leaves implicitly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeWire {
    pub h: u32,
    pub h_prime: u32,
    pub bounding: BoundingBox,
    pub leaves: Vec<(String, u64)>,
}

fn path_string(path: &[bool]) -> String {
    path.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Build the partition tree over the data's own bounding box. The box is
/// computed from the data but treated as public (no budget is spent on it);
/// use [`adaptive_binning_with_box`] to supply a public box instead.
pub fn adaptive_binning(data: &Dataset, config: &TreeConfig, rng: &RunRng) -> Result<PartitionTree> {
    let bx = bounding_box(data)?;
    adaptive_binning_with_box(data, config, &bx, rng)
}

pub fn adaptive_binning_with_box(
    data: &Dataset,
    config: &TreeConfig,
    bounding: &BoundingBox,
    rng: &RunRng,
) -> Result<PartitionTree> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bounding.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: bounding.dim(),
            got: data.dim(),
        });
    }
    let d = data.dim();
    let edge = bounding.edge();
    let (h, h_prime) = partition_shape(d, edge, config.s1, config.s2)?;
    let budget = h_prime - h;
    let scale = 2.0 * budget as f64 / config.epsilon_prime;

    let mut builder = Builder {
        data,
        config,
        rng,
        h,
        budget,
        scale,
        leaves: Vec::new(),
        explicit_deep_empty: Vec::new(),
        split_empty_level_h: Vec::new(),
        empty_split_occurred: false,
        max_noisy_draws: 0,
    };
    let indices: Vec<u32> = (0..data.len() as u32).collect();
    let center = bounding.center().coords().to_vec();
    let ext = vec![edge; d];
    builder.build(indices, center, ext, 0, Vec::new(), 0)?;

    Ok(PartitionTree {
        bounding: bounding.clone(),
        h,
        h_prime,
        leaves: builder.leaves,
        empty_split_occurred: builder.empty_split_occurred,
        explicit_deep_empty: builder.explicit_deep_empty,
        split_empty_level_h: builder.split_empty_level_h,
        max_noisy_draws_on_path: builder.max_noisy_draws,
    })
}

struct Builder<'a> {
    data: &'a Dataset,
    config: &'a TreeConfig,
    rng: &'a RunRng,
    h: u32,
    budget: u32,
    scale: f64,
    leaves: Vec<NonEmptyLeaf>,
    explicit_deep_empty: Vec<Vec<bool>>,
    split_empty_level_h: Vec<Vec<bool>>,
    empty_split_occurred: bool,
    max_noisy_draws: u32,
}

impl Builder<'_> {
    fn build(
        &mut self,
        indices: Vec<u32>,
        center: Vec<f64>,
        ext: Vec<f64>,
        depth: u32,
        path: Vec<bool>,
        noisy_draws: u32,
    ) -> Result<()> {
        let largest = ext.iter().cloned().fold(0.0_f64, f64::max);

        if depth < self.h {
            // Data-independent prefix: split unconditionally, no noise.
            // Empty regions stop being materialized here; their level-h
            // descendants are exactly the implicitly counted empty leaves.
            if indices.is_empty() {
                return Ok(());
            }
            return self.split(indices, center, ext, depth, path, noisy_draws);
        }

        let dd_depth = depth - self.h;
        if largest < self.config.s2 || dd_depth >= self.budget {
            self.record_leaf(path, indices.len() as u64, noisy_draws, depth);
            return Ok(());
        }

        // Noisy stop decision, one fresh draw per node keyed by its path.
        let mut stream = self.rng.stream(&format!("tree/{}", path_string(&path)));
        let noise = laplace(self.scale, &mut stream)?;
        let draws = noisy_draws + 1;
        if (indices.len() as f64) <= self.config.tau + noise {
            self.record_leaf(path, indices.len() as u64, draws, depth);
            return Ok(());
        }
        if indices.is_empty() {
            self.empty_split_occurred = true;
            if depth == self.h {
                self.split_empty_level_h.push(path.clone());
            }
        }
        self.split(indices, center, ext, depth, path, draws)
    }

    fn record_leaf(&mut self, path: Vec<bool>, count: u64, noisy_draws: u32, depth: u32) {
        self.max_noisy_draws = self.max_noisy_draws.max(noisy_draws);
        if count > 0 {
            self.leaves.push(NonEmptyLeaf { path, count });
        } else if depth > self.h {
            self.explicit_deep_empty.push(path);
        }
        // Empty leaves at depth == h belong to the implicit level-h set.
    }

    fn split(
        &mut self,
        indices: Vec<u32>,
        center: Vec<f64>,
        ext: Vec<f64>,
        depth: u32,
        path: Vec<bool>,
        noisy_draws: u32,
    ) -> Result<()> {
        let d = self.data.dim();
        let axis = depth as usize % d;
        let mid = center[axis];
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for &i in &indices {
            if self.data.points()[i as usize].coords()[axis] <= mid {
                left.push(i);
            } else {
                right.push(i);
            }
        }
        let w = ext[axis];
        let mut child_ext = ext;
        child_ext[axis] = w / 2.0;
        for (bit, part) in [(false, left), (true, right)] {
            let mut c = center.clone();
            c[axis] += if bit { w / 4.0 } else { -w / 4.0 };
            let mut p = path.clone();
            p.push(bit);
            self.build(part, c, child_ext.clone(), depth + 1, p, noisy_draws)?;
        }
        Ok(())
    }
}

/// One [`Bin`] per nonempty leaf, with exact counts. Empty leaves are
/// reported via [`implicit_empty_leaves`] instead of materialization.
pub fn leaf_bins(tree: &PartitionTree) -> Vec<Bin> {
    tree.leaves
        .iter()
        .map(|l| tree.bin_of(&l.path, l.count))
        .collect()
}

/// `(h, h')` of a partition over a box of the given edge:
/// `h = d ceil(log2(edge/s1))` unconditional levels, then
/// `ceil(d log2(s1/s2))` noisy ones.
pub fn partition_shape(dim: usize, edge: f64, s1: f64, s2: f64) -> Result<(u32, u32)> {
    if !(s1.is_finite() && s2.is_finite() && s1 > 0.0 && s2 > 0.0 && s2 < s1) {
        return Err(Error::invalid("edge limits must satisfy 0 < s2 < s1"));
    }
    if s1 > edge {
        return Err(Error::invalid("s1 must not exceed the bounding edge"));
    }
    let rounds = if edge > s1 {
        (edge / s1).log2().ceil() as u32
    } else {
        0
    };
    let h = dim as u32 * rounds;
    let budget = (dim as f64 * (s1 / s2).log2()).ceil() as u32;
    Ok((h, h + budget))
}

/// The Lemma-2 threshold floor: with `tau` above
/// `(2(h'-h)/eps') log((1/delta)(2^h + n(h'-h)))`, no empty bin is divided,
/// with probability at least `1 - delta`.
pub fn tau_floor(h: u32, h_prime: u32, n: u64, epsilon_prime: f64, delta: f64) -> Result<f64> {
    if h_prime <= h {
        return Err(Error::invalid("h' must exceed h"));
    }
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid("delta must be in (0, 1)"));
    }
    if !epsilon_prime.is_finite() || epsilon_prime <= 0.0 {
        return Err(Error::invalid("epsilon_prime must be > 0"));
    }
    let gap = (h_prime - h) as f64;
    // log(2^h + n (h'-h)), evaluated stably in log space
    let a = h as f64 * std::f64::consts::LN_2;
    let b = (n as f64 * gap).ln();
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    let log_sum = hi + (lo - hi).exp().ln_1p();
    Ok(2.0 * gap / epsilon_prime * (log_sum - delta.ln()))
}

/// Upper bound on the number of empty leaves: `2^h + n (h' - h)`.
pub fn empty_leaf_upper_bound(h: u32, h_prime: u32, n: u64) -> Result<u128> {
    if h_prime < h {
        return Err(Error::invalid("h' must be >= h"));
    }
    if h >= 120 {
        return Err(Error::Infeasible(format!(
            "2^{h} empty-leaf bound does not fit exact arithmetic"
        )));
    }
    Ok((1u128 << h) + u128::from(n) * u128::from(h_prime - h))
}

/// Implicit description of the tree's empty leaves: exact count plus a
/// uniform without-replacement sampler over them.
pub struct EmptyLeaves<'a> {
    tree: &'a PartitionTree,
    deep: Vec<Vec<bool>>,
    level_h_count: u128,
    level_h_excluded: HashSet<u128>,
    /// True when the path-based reconstruction was unusable (an empty node
    /// was split) and the build's explicit bookkeeping was used instead.
    pub used_fallback: bool,
}

fn level_h_bits(path: &[bool], h: u32) -> u128 {
    path.iter()
        .take(h as usize)
        .fold(0u128, |acc, &b| (acc << 1) | u128::from(b))
}

/// Recover the empty leaves from the nonempty-leaf paths alone.
///
/// Below level `h`, when no empty node was split, every empty leaf is an
/// off-path child between a nonempty leaf and its common ancestor with the
/// neighboring leaf; at level `h`, the empty leaves are the level-`h` cells
/// that are not ancestors of any nonempty leaf (sampled by rejection).
pub fn implicit_empty_leaves(tree: &PartitionTree) -> Result<EmptyLeaves<'_>> {
    if tree.h >= 120 {
        return Err(Error::Infeasible(format!(
            "2^{} level-h cells do not fit exact arithmetic",
            tree.h
        )));
    }
    let h = tree.h;
    let mut level_h_excluded: HashSet<u128> = tree
        .leaves
        .iter()
        .map(|l| level_h_bits(&l.path, h))
        .collect();

    let deep: Vec<Vec<bool>> = if tree.empty_split_occurred {
        for p in &tree.split_empty_level_h {
            level_h_excluded.insert(level_h_bits(p, h));
        }
        tree.explicit_deep_empty.clone()
    } else {
        // prefixes (all depths, including full paths) of nonempty leaves
        let mut prefixes: HashSet<Vec<bool>> = HashSet::new();
        for l in &tree.leaves {
            for k in 0..=l.path.len() {
                prefixes.insert(l.path[..k].to_vec());
            }
        }
        let mut seen: HashSet<Vec<bool>> = HashSet::new();
        let mut deep = Vec::new();
        for l in &tree.leaves {
            for k in (h as usize + 1)..=l.path.len() {
                let mut sibling = l.path[..k].to_vec();
                sibling[k - 1] = !sibling[k - 1];
                if !prefixes.contains(&sibling) && seen.insert(sibling.clone()) {
                    deep.push(sibling);
                }
            }
        }
        deep
    };

    let level_h_count = (1u128 << h) - level_h_excluded.len() as u128;
    Ok(EmptyLeaves {
        tree,
        deep,
        level_h_count,
        level_h_excluded,
        used_fallback: tree.empty_split_occurred,
    })
}

impl EmptyLeaves<'_> {
    /// Exact number of empty leaves.
    pub fn count(&self) -> u128 {
        self.deep.len() as u128 + self.level_h_count
    }

    pub fn count_as_bincount(&self) -> BinCount {
        BinCount::Exact(self.count())
    }

    /// Uniform sample of `how_many` distinct empty leaves, as zero-count
    /// bins. Memory O(nonempty + how_many).
    pub fn sample(&self, how_many: u64, rng: &mut impl Rng) -> Result<Vec<Bin>> {
        if u128::from(how_many) > self.count() {
            return Err(Error::NotEnoughEmptyBins {
                requested: u128::from(how_many),
                available: self.count(),
            });
        }
        let h = self.tree.h;
        let mut deep_pool: Vec<&Vec<bool>> = self.deep.iter().collect();
        let mut chosen_level_h: HashSet<u128> = HashSet::new();
        let mut remaining_level_h = self.level_h_count;
        let mut out = Vec::with_capacity(how_many as usize);

        // When the request nearly exhausts a small level-h stratum, rejection
        // sampling stalls; enumerate instead.
        let enumerate_level_h = h <= 20
            && u128::from(how_many) * 2 >= self.level_h_count + deep_pool.len() as u128;
        let mut level_h_pool: Vec<u128> = Vec::new();
        if enumerate_level_h {
            level_h_pool = (0..(1u128 << h))
                .filter(|bits| !self.level_h_excluded.contains(bits))
                .collect();
        }

        for _ in 0..how_many {
            let total = deep_pool.len() as u128 + remaining_level_h;
            let pick = rng.random_range(0..total);
            if pick < deep_pool.len() as u128 {
                let path = deep_pool.swap_remove(pick as usize);
                let (c, e) = self.tree.region_of(path);
                out.push(Bin::new(Point::new(c)?, e, 0)?);
            } else {
                let bits = if enumerate_level_h {
                    let i = rng.random_range(0..level_h_pool.len());
                    level_h_pool.swap_remove(i)
                } else {
                    loop {
                        let bits = if h == 0 {
                            0
                        } else {
                            rng.random_range(0..(1u128 << h))
                        };
                        if !self.level_h_excluded.contains(&bits)
                            && !chosen_level_h.contains(&bits)
                        {
                            break bits;
                        }
                    }
                };
                chosen_level_h.insert(bits);
                remaining_level_h -= 1;
                let path: Vec<bool> = (0..h).rev().map(|k| (bits >> k) & 1 == 1).collect();
                let (c, e) = self.tree.region_of(&path);
                out.push(Bin::new(Point::new(c)?, e, 0)?);
            }
        }
        Ok(out)
    }
}
