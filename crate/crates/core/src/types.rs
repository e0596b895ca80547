//! Shared domain types: points, datasets, bins, and bounding geometry.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Edge length used for a degenerate bounding box (all points identical),
/// so that partitioning still terminates.
pub const MIN_EDGE: f64 = 1e-9;

/// A point in `R^d`. All coordinates are finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("point must have at least one coordinate"));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        Ok(Point { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn squared_distance(&self, other: &Point) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum())
    }
}

/// The sensitive input: `n >= 1` points, all of dimension `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    points: Vec<Point>,
    dim: usize,
}

impl Dataset {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyInput)?;
        let dim = first.dim();
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
        }
        Ok(Dataset { points, dim })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let points = rows.into_iter().map(Point::new).collect::<Result<_>>()?;
        Dataset::new(points)
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// A weighted dataset: the synthetic output and all intermediate binned
/// representations. Weights are strictly positive and unnormalized (noisy
/// counts); KDE/MMD normalize on the fly.
///
/// The entry list may be empty (a release where every bin was filtered out);
/// density operations reject such inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedDataset {
    entries: Vec<(Point, f64)>,
    dim: usize,
}

impl WeightedDataset {
    pub fn new(entries: Vec<(Point, f64)>, dim: usize) -> Result<Self> {
        for (p, w) in &entries {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            if !w.is_finite() || *w <= 0.0 {
                return Err(Error::invalid("weights must be finite and > 0"));
            }
        }
        Ok(WeightedDataset { entries, dim })
    }

    /// All points with unit weight.
    pub fn from_dataset(data: &Dataset) -> Self {
        WeightedDataset {
            entries: data.points().iter().map(|p| (p.clone(), 1.0)).collect(),
            dim: data.dim(),
        }
    }

    pub fn entries(&self) -> &[(Point, f64)] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }
}

/// Axis-aligned hypercube enclosing a dataset. `edge` is the full edge length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    center: Point,
    edge: f64,
}

impl BoundingBox {
    pub fn new(center: Point, edge: f64) -> Result<Self> {
        if !edge.is_finite() || edge <= 0.0 {
            return Err(Error::invalid("bounding box edge must be > 0"));
        }
        Ok(BoundingBox { center, edge })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn edge(&self) -> f64 {
        self.edge
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn low(&self, axis: usize) -> f64 {
        self.center.coords()[axis] - self.edge / 2.0
    }

    pub fn high(&self, axis: usize) -> f64 {
        self.center.coords()[axis] + self.edge / 2.0
    }

    pub fn contains(&self, p: &Point) -> bool {
        // relative slack: the box center/edge are computed with rounding, so
        // boundary points can land a few ulps outside
        let tol = self.edge * 1e-12;
        p.dim() == self.dim()
            && (0..self.dim()).all(|i| {
                let c = p.coords()[i];
                c >= self.low(i) - tol && c <= self.high(i) + tol
            })
    }
}

/// A partition cell with its center, per-axis widths and noiseless count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub center: Point,
    pub edges: Vec<f64>,
    pub count: u64,
}

impl Bin {
    pub fn new(center: Point, edges: Vec<f64>, count: u64) -> Result<Self> {
        if edges.len() != center.dim() {
            return Err(Error::DimensionMismatch {
                expected: center.dim(),
                got: edges.len(),
            });
        }
        if edges.iter().any(|e| !e.is_finite() || *e <= 0.0) {
            return Err(Error::invalid("bin edges must be > 0"));
        }
        Ok(Bin {
            center,
            edges,
            count,
        })
    }
}

/// Smallest axis-aligned hypercube containing all points: per-axis center at
/// the midpoint of the range, edge equal to the largest per-axis range.
///
/// A degenerate box (all points identical) gets edge [`MIN_EDGE`].
pub fn bounding_box(data: &Dataset) -> Result<BoundingBox> {
    if data.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = data.dim();
    let mut low = vec![f64::INFINITY; d];
    let mut high = vec![f64::NEG_INFINITY; d];
    for p in data.points() {
        for (i, &c) in p.coords().iter().enumerate() {
            low[i] = low[i].min(c);
            high[i] = high[i].max(c);
        }
    }
    let center: Vec<f64> = (0..d).map(|i| (low[i] + high[i]) / 2.0).collect();
    let edge = (0..d)
        .map(|i| high[i] - low[i])
        .fold(0.0_f64, f64::max)
        .max(MIN_EDGE);
    BoundingBox::new(Point::new(center)?, edge)
}
