//! Points, distance matrices and tours.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

/// Index of a point in an [`Instance`].
pub type PointId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

/// How coordinate instances turn into distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceConvention {
    /// Exact Euclidean distances, or raw matrix entries.
    #[default]
    Exact,
    /// TSPLIB `EUC_2D`: Euclidean distance rounded to the nearest integer.
    TsplibRounded,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("an instance needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("point {0} has a non-finite coordinate")]
    NonFiniteCoordinate(PointId),
    #[error("distance matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("negative or non-finite distance at ({0}, {1})")]
    NegativeDistance(usize, usize),
    #[error("nonzero diagonal entry at ({0}, {0})")]
    NonzeroDiagonal(usize),
    #[error("point id {id} out of range for an instance of {n} points")]
    InvalidPointId { id: PointId, n: usize },
    #[error("operation requires point coordinates; instance is matrix-only")]
    CoordinatesRequired,
}

/// A symmetric TSP instance: an optional point set plus its full distance matrix.
///
/// Instances are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    name: String,
    n: usize,
    coords: Option<Vec<Point>>,
    dist: Vec<f64>,
    convention: DistanceConvention,
}

impl Instance {
    /// Euclidean instance with exact distances. Coincident points are allowed.
    pub fn from_points(points: Vec<Point>) -> Result<Self, InstanceError> {
        Self::from_points_with(points, DistanceConvention::Exact)
    }

    pub fn from_points_with(
        points: Vec<Point>,
        convention: DistanceConvention,
    ) -> Result<Self, InstanceError> {
        let n = points.len();
        if n < 3 {
            return Err(InstanceError::TooFewPoints(n));
        }
        if let Some(bad) = points.iter().position(|p| !p.is_finite()) {
            return Err(InstanceError::NonFiniteCoordinate(bad));
        }
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = match convention {
                    DistanceConvention::Exact => points[i].dist(&points[j]),
                    DistanceConvention::TsplibRounded => tsplib_nint(&points[i], &points[j]),
                };
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self {
            name: String::new(),
            n,
            coords: Some(points),
            dist,
            convention,
        })
    }

    /// Matrix-only instance. Triangle inequality is not required.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self, InstanceError> {
        let n = matrix.len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(InstanceError::NotSquare { row, len: r.len(), n });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let v = matrix[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(InstanceError::NegativeDistance(i, j));
                }
                if i == j && v != 0.0 {
                    return Err(InstanceError::NonzeroDiagonal(i));
                }
                if matrix[j][i] != v {
                    return Err(InstanceError::NotSymmetric(i.min(j), i.max(j)));
                }
            }
        }
        if n < 3 {
            return Err(InstanceError::TooFewPoints(n));
        }
        Ok(Self {
            name: String::new(),
            n,
            coords: None,
            dist: matrix.into_iter().flatten().collect(),
            convention: DistanceConvention::Exact,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn convention(&self) -> DistanceConvention {
        self.convention
    }

    pub fn coords(&self) -> Option<&[Point]> {
        self.coords.as_deref()
    }

    pub fn require_coords(&self) -> Result<&[Point], InstanceError> {
        self.coords().ok_or(InstanceError::CoordinatesRequired)
    }

    /// Distance lookup without bounds checking beyond the slice's own.
    #[inline]
    pub fn d(&self, i: PointId, j: PointId) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: PointId) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    /// Rows of the distance matrix as nested vectors.
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn check_id(&self, id: PointId) -> Result<(), InstanceError> {
        if id < self.n {
            Ok(())
        } else {
            Err(InstanceError::InvalidPointId { id, n: self.n })
        }
    }

    /// True if every triple satisfies the triangle inequality within `eps`.
    pub fn is_metric(&self, eps: f64) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| (0..n).all(|k| self.d(i, k) <= self.d(i, j) + self.d(j, k) + eps))
        })
    }
}

/// TSPLIB `nint` for `EUC_2D`.
fn tsplib_nint(a: &Point, b: &Point) -> f64 {
    let xd = a.x - b.x;
    let yd = a.y - b.y;
    ((xd * xd + yd * yd).sqrt() + 0.5).floor()
}

/// An adjacent pair on a tour.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: PointId,
    pub b: PointId,
}

impl Edge {
    pub const fn new(a: PointId, b: PointId) -> Self {
        Self { a, b }
    }

    pub fn touches(&self, other: &Edge) -> bool {
        self.a == other.a || self.a == other.b || self.b == other.a || self.b == other.b
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Cyclic visiting order; the last point connects back to the first.
///
/// A `Tour` is not validated on construction; see [`validate_tour`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tour {
    order: Vec<PointId>,
}

impl Tour {
    pub fn new(order: Vec<PointId>) -> Self {
        Self { order }
    }

    pub fn order(&self) -> &[PointId] {
        &self.order
    }

    pub fn into_order(self) -> Vec<PointId> {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.order.contains(&p)
    }

    /// Edge leaving position `pos`.
    pub fn edge(&self, pos: usize) -> Edge {
        let m = self.order.len();
        Edge::new(self.order[pos], self.order[(pos + 1) % m])
    }

    /// Edges in position order; edge `k` joins `order[k]` and `order[k + 1]`.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.order.len()).map(move |k| self.edge(k))
    }

    /// Tour with `p` placed on edge `pos`, i.e. between `order[pos]` and its successor.
    pub fn inserted(&self, pos: usize, p: PointId) -> Tour {
        let mut order = Vec::with_capacity(self.order.len() + 1);
        order.extend_from_slice(&self.order[..=pos]);
        order.push(p);
        order.extend_from_slice(&self.order[pos + 1..]);
        Tour { order }
    }

    /// Tour with the point at position `pos` removed and its neighbours joined.
    pub fn removed(&self, pos: usize) -> Tour {
        let mut order = self.order.clone();
        order.remove(pos);
        Tour { order }
    }

    /// Canonical representative of the tour's rotation/reflection class:
    /// smallest id first, then the lexicographically smaller direction.
    pub fn canonical(&self) -> Tour {
        Tour {
            order: canonical_order(&self.order),
        }
    }

    pub fn reversed(&self) -> Tour {
        let mut order = self.order.clone();
        order.reverse();
        Tour { order }
    }
}

impl From<Vec<PointId>> for Tour {
    fn from(order: Vec<PointId>) -> Self {
        Self { order }
    }
}

pub(crate) fn canonical_order(order: &[PointId]) -> Vec<PointId> {
    let m = order.len();
    if m == 0 {
        return Vec::new();
    }
    let start = (0..m).min_by_key(|&i| order[i]).unwrap_or(0);
    let fwd: Vec<PointId> = (0..m).map(|k| order[(start + k) % m]).collect();
    let bwd: Vec<PointId> = (0..m).map(|k| order[(start + m - k) % m]).collect();
    fwd.min(bwd)
}

/// Length of the closed tour. A two-point tour counts its edge twice.
pub fn tour_length(inst: &Instance, t: &Tour) -> Result<f64, InstanceError> {
    for &p in t.order() {
        inst.check_id(p)?;
    }
    Ok(tour_length_unchecked(inst, t.order()))
}

pub(crate) fn tour_length_unchecked(inst: &Instance, order: &[PointId]) -> f64 {
    let m = order.len();
    if m < 2 {
        return 0.0;
    }
    (0..m).map(|k| inst.d(order[k], order[(k + 1) % m])).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TourViolation {
    OutOfRange { position: usize, id: PointId },
    Duplicate { id: PointId, positions: Vec<usize> },
    Missing { id: PointId },
    TooShort { len: usize },
}

impl fmt::Display for TourViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TourViolation::OutOfRange { position, id } => {
                write!(f, "id {id} at position {position} is out of range")
            }
            TourViolation::Duplicate { id, positions } => {
                write!(f, "id {id} appears at positions {positions:?}")
            }
            TourViolation::Missing { id } => write!(f, "point {id} is not visited"),
            TourViolation::TooShort { len } => write!(f, "tour has {len} points, need at least 2"),
        }
    }
}

/// Checks a tour for out-of-range ids, repeats and (optionally) coverage.
pub fn validate_tour(inst: &Instance, t: &Tour, require_complete: bool) -> Result<(), Vec<TourViolation>> {
    let mut violations = Vec::new();
    let order = t.order();
    if order.len() < 2 {
        violations.push(TourViolation::TooShort { len: order.len() });
    }
    let mut positions: Vec<Vec<usize>> = vec![Vec::new(); inst.len()];
    for (pos, &id) in order.iter().enumerate() {
        match positions.get_mut(id) {
            Some(slot) => slot.push(pos),
            None => violations.push(TourViolation::OutOfRange { position: pos, id }),
        }
    }
    for (id, pos) in positions.iter().enumerate() {
        if pos.len() > 1 {
            violations.push(TourViolation::Duplicate { id, positions: pos.clone() });
        } else if pos.is_empty() && require_complete {
            violations.push(TourViolation::Missing { id });
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// True if `t` visits every point of `inst` exactly once.
pub fn is_complete_tour(inst: &Instance, t: &Tour) -> bool {
    t.len() == inst.len()
        && t.order().iter().all(|&p| p < inst.len())
        && t.order().iter().collect::<HashSet<_>>().len() == inst.len()
}
