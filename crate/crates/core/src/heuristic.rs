//! The adding procedure (max-min and min-min), and the cutting procedure.
//!
//! A run starts from the farthest pair, grows it into the triangle of largest
//! perimeter, then inserts one outside point per step. Every decision is
//! returned as a [`TieSet`] listing all candidates that achieve the step's
//! optimum within the tolerance `eps`; a [`TiePolicy`] picks which one is
//! applied. The default policy takes the lowest edge position, then the lowest
//! point id, which is always index 0 of a tie set.
//!
//! All comparisons that steer the algorithm use one absolute tolerance on
//! disturbance values (`DEFAULT_EPS` unless overridden).

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::instance::{
    tour_length_unchecked, validate_tour, Edge, Instance, InstanceError, PointId,
    Tour, TourViolation,
};
use crate::oracle::{self, OracleError};

pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeuristicError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("tour already visits every point")]
    TourComplete,
    #[error("partial tour needs at least 3 points, got {0}")]
    TourTooShort(usize),
    #[error("cannot cut a tour of {0} points; cutting stops at a triangle")]
    TourTooSmall(usize),
    #[error("tour must visit every point exactly once")]
    IncompleteTour,
    #[error("invalid tour: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidTour(Vec<TourViolation>),
    #[error("point {0} is an endpoint of the edge it would be inserted into")]
    PointOnEdge(PointId),
    #[error("initial pair must be two distinct points")]
    DegeneratePair,
    #[error("choice {choice} out of range for decision {decision} with {ties} candidates")]
    ChoiceOutOfRange { decision: usize, choice: usize, ties: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Insert the candidate whose per-edge minimum disturbance is largest.
    MaxMin,
    /// Insert the globally cheapest (edge, point) pair.
    MinMin,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::MaxMin => "maxmin",
            Variant::MinMin => "minmin",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "maxmin" => Ok(Variant::MaxMin),
            "minmin" => Ok(Variant::MinMin),
            _ => Err(format!("unknown variant `{s}` (expected maxmin or minmin)")),
        }
    }
}

/// All candidates achieving a decision's optimum within tolerance.
///
/// Candidates are sorted in policy order, so `chosen` is always 0; it is kept
/// explicit because serialized traces are read by other tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieSet<T> {
    pub candidates: Vec<T>,
    pub chosen: usize,
}

impl<T> TieSet<T> {
    fn sorted(candidates: Vec<T>) -> Self {
        debug_assert!(!candidates.is_empty());
        Self { candidates, chosen: 0 }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn is_tie(&self) -> bool {
        self.candidates.len() > 1
    }

    pub fn chosen(&self) -> &T {
        &self.candidates[self.chosen]
    }
}

/// Inserting `point` into the tour edge at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InsertionCandidate {
    pub position: usize,
    pub edge: Edge,
    pub point: PointId,
    pub delta: f64,
}

/// Removing the tour point at `position`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutCandidate {
    pub position: usize,
    pub point: PointId,
    pub delta: f64,
}

#[inline]
fn delta(inst: &Instance, a: PointId, b: PointId, p: PointId) -> f64 {
    inst.d(a, p) + inst.d(p, b) - inst.d(a, b)
}

/// Length change from replacing edge `e` by the detour through `p`.
///
/// Negative on non-metric matrices.
pub fn disturbance(inst: &Instance, e: Edge, p: PointId) -> Result<f64, HeuristicError> {
    inst.check_id(e.a)?;
    inst.check_id(e.b)?;
    inst.check_id(p)?;
    if p == e.a || p == e.b {
        return Err(HeuristicError::PointOnEdge(p));
    }
    Ok(delta(inst, e.a, e.b, p))
}

/// Every unordered pair within `eps` of the largest pairwise distance, as `[i, j]` with `i < j`.
pub fn initial_pair(inst: &Instance, eps: f64) -> TieSet<[PointId; 2]> {
    let n = inst.len();
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            best = best.max(inst.d(i, j));
        }
    }
    let mut ties = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if inst.d(i, j) >= best - eps {
                ties.push([i, j]);
            }
        }
    }
    TieSet::sorted(ties)
}

/// Every third point within `eps` of maximising the triangle perimeter over `pair`.
pub fn initial_triangle(
    inst: &Instance,
    pair: [PointId; 2],
    eps: f64,
) -> Result<TieSet<PointId>, HeuristicError> {
    let [a, b] = pair;
    inst.check_id(a)?;
    inst.check_id(b)?;
    if a == b {
        return Err(HeuristicError::DegeneratePair);
    }
    let score = |c: PointId| inst.d(a, c) + inst.d(c, b);
    let others = || (0..inst.len()).filter(|&c| c != a && c != b);
    let best = others().map(score).fold(f64::NEG_INFINITY, f64::max);
    Ok(TieSet::sorted(others().filter(|&c| score(c) >= best - eps).collect()))
}

/// Marks tour members and checks the partial-tour preconditions of a step.
fn tour_mask(inst: &Instance, t: &Tour) -> Result<Vec<bool>, HeuristicError> {
    validate_tour(inst, t, false).map_err(HeuristicError::InvalidTour)?;
    if t.len() < 3 {
        return Err(HeuristicError::TourTooShort(t.len()));
    }
    if t.len() == inst.len() {
        return Err(HeuristicError::TourComplete);
    }
    let mut mask = vec![false; inst.len()];
    for &p in t.order() {
        mask[p] = true;
    }
    Ok(mask)
}

/// Minimum disturbance of one edge over the outside points, with its near-minimal points.
#[derive(Debug, Clone)]
struct EdgeMin {
    min: f64,
    ties: Vec<(PointId, f64)>,
}

fn scan_edge(inst: &Instance, a: PointId, b: PointId, outside: &[PointId], eps: f64) -> EdgeMin {
    let mut min = f64::INFINITY;
    for &p in outside {
        min = min.min(delta(inst, a, b, p));
    }
    let mut ties: Vec<(PointId, f64)> = outside
        .iter()
        .map(|&p| (p, delta(inst, a, b, p)))
        .filter(|&(_, d)| d <= min + eps)
        .collect();
    ties.sort_unstable_by_key(|&(p, _)| p);
    EdgeMin { min, ties }
}

fn select(
    tour: &[PointId],
    edges: &[EdgeMin],
    variant: Variant,
    eps: f64,
) -> TieSet<InsertionCandidate> {
    let m = tour.len();
    let mut out = Vec::new();
    match variant {
        Variant::MaxMin => {
            let best = edges.iter().map(|e| e.min).fold(f64::NEG_INFINITY, f64::max);
            for (k, e) in edges.iter().enumerate() {
                if e.min >= best - eps {
                    let edge = Edge::new(tour[k], tour[(k + 1) % m]);
                    out.extend(e.ties.iter().map(|&(point, delta)| InsertionCandidate {
                        position: k,
                        edge,
                        point,
                        delta,
                    }));
                }
            }
        }
        Variant::MinMin => {
            let best = edges.iter().map(|e| e.min).fold(f64::INFINITY, f64::min);
            for (k, e) in edges.iter().enumerate() {
                if e.min <= best + eps {
                    let edge = Edge::new(tour[k], tour[(k + 1) % m]);
                    out.extend(e.ties.iter().filter(|&&(_, d)| d <= best + eps).map(
                        |&(point, delta)| InsertionCandidate {
                            position: k,
                            edge,
                            point,
                            delta,
                        },
                    ));
                }
            }
        }
    }
    TieSet::sorted(out)
}

fn full_step(
    inst: &Instance,
    t: &Tour,
    variant: Variant,
    eps: f64,
) -> Result<TieSet<InsertionCandidate>, HeuristicError> {
    let mask = tour_mask(inst, t)?;
    let outside: Vec<PointId> = (0..inst.len()).filter(|&p| !mask[p]).collect();
    let edges: Vec<EdgeMin> = t
        .edges()
        .map(|e| scan_edge(inst, e.a, e.b, &outside, eps))
        .collect();
    Ok(select(t.order(), &edges, variant, eps))
}

/// One max-min insertion decision on a partial tour.
///
/// Every edge is paired with its cheapest outside points; the edges whose
/// minimum is within `eps` of the largest minimum contribute all of their
/// near-minimal points to the tie set.
pub fn maxmin_step(inst: &Instance, t: &Tour, eps: f64) -> Result<TieSet<InsertionCandidate>, HeuristicError> {
    full_step(inst, t, Variant::MaxMin, eps)
}

/// One min-min insertion decision: all (edge, point) pairs within `eps` of the global minimum.
pub fn minmin_step(inst: &Instance, t: &Tour, eps: f64) -> Result<TieSet<InsertionCandidate>, HeuristicError> {
    full_step(inst, t, Variant::MinMin, eps)
}

pub fn insertion_step(
    inst: &Instance,
    t: &Tour,
    variant: Variant,
    eps: f64,
) -> Result<TieSet<InsertionCandidate>, HeuristicError> {
    full_step(inst, t, variant, eps)
}

pub fn apply_insertion(t: &Tour, c: &InsertionCandidate) -> Tour {
    t.inserted(c.position, c.point)
}

/// Chooses among tied candidates. `decision` counts from 0 (initial pair),
/// 1 (third point), then one per insertion.
pub trait TiePolicy {
    fn choose(&mut self, decision: usize, ties: usize) -> usize;
}

/// Always the first candidate: lowest edge position, then lowest point id.
#[derive(Debug, Clone, Copy, Default)]
pub struct FirstCandidate;

impl TiePolicy for FirstCandidate {
    fn choose(&mut self, _decision: usize, _ties: usize) -> usize {
        0
    }
}

/// Replays a recorded choice sequence; decisions past its end take index 0.
#[derive(Debug, Clone)]
pub struct Scripted<'a>(pub &'a [usize]);

impl TiePolicy for Scripted<'_> {
    fn choose(&mut self, decision: usize, _ties: usize) -> usize {
        self.0.get(decision).copied().unwrap_or(0)
    }
}

/// Full record of an adding run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub variant: Variant,
    pub eps: f64,
    pub initial_pair: TieSet<[PointId; 2]>,
    pub initial_third: TieSet<PointId>,
    pub steps: Vec<TieSet<InsertionCandidate>>,
    /// Index taken at each decision, in the same numbering as [`TiePolicy`].
    pub choices: Vec<usize>,
    pub final_tour: Tour,
    pub final_length: f64,
}

impl RunTrace {
    pub fn triangle(&self) -> [PointId; 3] {
        let [a, b] = self.initial_pair.candidates[self.choices[0]];
        [a, b, self.initial_third.candidates[self.choices[1]]]
    }

    /// Points in the order the insertion steps added them (triangle excluded).
    pub fn insertion_order(&self) -> Vec<PointId> {
        self.steps
            .iter()
            .zip(&self.choices[2..])
            .map(|(s, &c)| s.candidates[c].point)
            .collect()
    }

    /// Tie-set sizes of every decision, initial pair and third point first.
    pub fn tie_sizes(&self) -> Vec<usize> {
        let mut v = vec![self.initial_pair.len(), self.initial_third.len()];
        v.extend(self.steps.iter().map(TieSet::len));
        v
    }

    pub fn has_ties(&self) -> bool {
        self.tie_sizes().into_iter().any(|s| s > 1)
    }

    /// Rebuilds the final tour from the recorded decisions alone.
    pub fn replay(&self) -> Tour {
        let mut tour = Tour::new(self.triangle().to_vec());
        for (step, &c) in self.steps.iter().zip(&self.choices[2..]) {
            tour = apply_insertion(&tour, &step.candidates[c]);
        }
        tour
    }
}

/// Incremental state for a full run: per-edge minima are only rescanned for
/// new edges and for edges whose near-minimal set contained the inserted point.
struct Builder<'a> {
    inst: &'a Instance,
    eps: f64,
    tour: Vec<PointId>,
    outside: Vec<PointId>,
    edges: Vec<EdgeMin>,
}

impl<'a> Builder<'a> {
    fn new(inst: &'a Instance, triangle: [PointId; 3], eps: f64) -> Self {
        let outside: Vec<PointId> = (0..inst.len()).filter(|p| !triangle.contains(p)).collect();
        let mut b = Self {
            inst,
            eps,
            tour: triangle.to_vec(),
            outside,
            edges: Vec::new(),
        };
        if !b.outside.is_empty() {
            b.edges = (0..3)
                .map(|k| b.scan(b.tour[k], b.tour[(k + 1) % 3]))
                .collect();
        }
        b
    }

    fn scan(&self, a: PointId, b: PointId) -> EdgeMin {
        scan_edge(self.inst, a, b, &self.outside, self.eps)
    }

    fn insert(&mut self, position: usize, p: PointId) {
        let m = self.tour.len();
        let (a, b) = (self.tour[position], self.tour[(position + 1) % m]);
        self.tour.insert(position + 1, p);
        self.outside.retain(|&q| q != p);
        if self.outside.is_empty() {
            self.edges.clear();
            return;
        }
        let left = self.scan(a, p);
        let right = self.scan(p, b);
        self.edges.splice(position..=position, [left, right]);
        let m = self.tour.len();
        for k in 0..m {
            if k != position
                && k != position + 1
                && self.edges[k].ties.iter().any(|&(q, _)| q == p)
            {
                self.edges[k] = self.scan(self.tour[k], self.tour[(k + 1) % m]);
            }
        }
    }
}

/// Runs the adding procedure with the default tie policy.
pub fn run_adding(inst: &Instance, variant: Variant, eps: f64) -> Result<RunTrace, HeuristicError> {
    run_adding_with(inst, variant, eps, &mut FirstCandidate)
}

pub fn run_adding_with(
    inst: &Instance,
    variant: Variant,
    eps: f64,
    policy: &mut dyn TiePolicy,
) -> Result<RunTrace, HeuristicError> {
    let n = inst.len();
    if n < 3 {
        return Err(InstanceError::TooFewPoints(n).into());
    }
    let mut choices = Vec::with_capacity(n);
    let mut take = |decision: usize, ties: usize| -> Result<usize, HeuristicError> {
        let choice = policy.choose(decision, ties);
        if choice >= ties {
            return Err(HeuristicError::ChoiceOutOfRange { decision, choice, ties });
        }
        Ok(choice)
    };

    let initial_pair = initial_pair(inst, eps);
    choices.push(take(0, initial_pair.len())?);
    let pair = initial_pair.candidates[choices[0]];
    let initial_third = initial_triangle(inst, pair, eps)?;
    choices.push(take(1, initial_third.len())?);
    let third = initial_third.candidates[choices[1]];

    let mut builder = Builder::new(inst, [pair[0], pair[1], third], eps);
    let mut steps = Vec::with_capacity(n - 3);
    while !builder.outside.is_empty() {
        let ties = select(&builder.tour, &builder.edges, variant, eps);
        let choice = take(steps.len() + 2, ties.len())?;
        choices.push(choice);
        let c = ties.candidates[choice];
        builder.insert(c.position, c.point);
        steps.push(ties);
    }
    let final_length = tour_length_unchecked(inst, &builder.tour);
    Ok(RunTrace {
        variant,
        eps,
        initial_pair,
        initial_third,
        steps,
        choices,
        final_tour: Tour::new(builder.tour),
        final_length,
    })
}

/// Cut disturbances of every tour point, near-minimal ones first by point id.
pub fn cut_candidates(inst: &Instance, t: &Tour, eps: f64) -> Result<TieSet<CutCandidate>, HeuristicError> {
    validate_tour(inst, t, false).map_err(HeuristicError::InvalidTour)?;
    if t.len() < 4 {
        return Err(HeuristicError::TourTooSmall(t.len()));
    }
    let order = t.order();
    let m = order.len();
    let all: Vec<CutCandidate> = (0..m)
        .map(|i| {
            let (a, b, c) = (order[(i + m - 1) % m], order[i], order[(i + 1) % m]);
            CutCandidate {
                position: i,
                point: b,
                delta: (inst.d(a, c) - inst.d(a, b) - inst.d(b, c)).abs(),
            }
        })
        .collect();
    let best = all.iter().map(|c| c.delta).fold(f64::INFINITY, f64::min);
    let mut ties: Vec<CutCandidate> = all.into_iter().filter(|c| c.delta <= best + eps).collect();
    ties.sort_by_key(|c| c.point);
    Ok(TieSet::sorted(ties))
}

/// Removes the point whose removal disturbs the tour length least.
pub fn cut_step(inst: &Instance, t: &Tour, eps: f64) -> Result<(Tour, TieSet<CutCandidate>), HeuristicError> {
    let ties = cut_candidates(inst, t, eps)?;
    Ok((t.removed(ties.chosen().position), ties))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuttingTrace {
    pub removed: Vec<PointId>,
    pub deltas: Vec<f64>,
    pub steps: Vec<TieSet<CutCandidate>>,
    pub final_tour: Tour,
}

impl CuttingTrace {
    /// Whether the recorded disturbances never decrease by more than `eps`.
    pub fn deltas_nondecreasing(&self, eps: f64) -> bool {
        self.deltas.windows(2).all(|w| w[1] >= w[0] - eps)
    }
}

/// Cuts a complete tour down to a triangle.
pub fn run_cutting(inst: &Instance, t: &Tour, eps: f64) -> Result<CuttingTrace, HeuristicError> {
    validate_tour(inst, t, true).map_err(HeuristicError::InvalidTour)?;
    let mut tour = t.clone();
    let mut trace = CuttingTrace {
        removed: Vec::new(),
        deltas: Vec::new(),
        steps: Vec::new(),
        final_tour: Tour::default(),
    };
    while tour.len() > 3 {
        let (next, ties) = cut_step(inst, &tour, eps)?;
        trace.removed.push(ties.chosen().point);
        trace.deltas.push(ties.chosen().delta);
        trace.steps.push(ties);
        tour = next;
    }
    trace.final_tour = tour;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantCorrespondence {
    pub variant: Variant,
    pub insertion_order: Vec<PointId>,
    /// Reversed removal order equals the insertion order.
    pub orders_match: bool,
    pub final_length: f64,
    pub reaches_optimum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub optimal_tour: Tour,
    pub optimal_length: f64,
    pub removal_order: Vec<PointId>,
    pub cut_deltas: Vec<f64>,
    pub maxmin: VariantCorrespondence,
    pub minmin: VariantCorrespondence,
}

impl CorrespondenceReport {
    pub fn variant(&self, v: Variant) -> &VariantCorrespondence {
        match v {
            Variant::MaxMin => &self.maxmin,
            Variant::MinMin => &self.minmin,
        }
    }
}

/// Cuts the exact optimum down to a triangle and checks whether either
/// adding variant retraces those cuts in reverse.
pub fn inverse_correspondence(inst: &Instance, eps: f64) -> Result<CorrespondenceReport, HeuristicError> {
    let opt = oracle::optimal(inst)?;
    let cutting = run_cutting(inst, &opt.tour, eps)?;
    let reversed: Vec<PointId> = cutting.removed.iter().rev().copied().collect();
    let tol = 1e-9 * opt.length.abs().max(1.0);
    let compare = |variant| -> Result<VariantCorrespondence, HeuristicError> {
        let run = run_adding(inst, variant, eps)?;
        let insertion_order = run.insertion_order();
        Ok(VariantCorrespondence {
            variant,
            orders_match: insertion_order == reversed,
            insertion_order,
            final_length: run.final_length,
            reaches_optimum: run.final_length <= opt.length + tol,
        })
    };
    Ok(CorrespondenceReport {
        maxmin: compare(Variant::MaxMin)?,
        minmin: compare(Variant::MinMin)?,
        optimal_tour: opt.tour,
        optimal_length: opt.length,
        removal_order: cutting.removed,
        cut_deltas: cutting.deltas,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{tour_length, Point};

    fn inst(pts: &[(f64, f64)]) -> Instance {
        Instance::from_points(pts.iter().copied().map(Point::from).collect()).unwrap()
    }

    fn hypot(a: (f64, f64), b: (f64, f64)) -> f64 {
        ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
    }

    const EPS: f64 = DEFAULT_EPS;

    #[test]
    fn disturbance_examples() {
        let i = inst(&[(0.0, 0.0), (2.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 0.0)]);
        let e = Edge::new(0, 1);
        assert_eq!(disturbance(&i, e, 2).unwrap(), 0.0);
        assert!((disturbance(&i, e, 3).unwrap() - (2.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!((disturbance(&i, e, 3).unwrap() - 0.828427).abs() < 1e-6);
        assert_eq!(disturbance(&i, e, 4).unwrap(), 0.0);
        assert_eq!(disturbance(&i, e, 0), Err(HeuristicError::PointOnEdge(0)));
        assert!(matches!(
            disturbance(&i, e, 9),
            Err(HeuristicError::Instance(InstanceError::InvalidPointId { id: 9, .. }))
        ));
    }

    #[test]
    fn initial_pair_examples() {
        let sq = inst(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(initial_pair(&sq, EPS).candidates, vec![[0, 3], [1, 2]]);
        let tri = inst(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        assert_eq!(initial_pair(&tri, EPS).candidates, vec![[1, 2]]);
        let h = 3f64.sqrt() / 2.0;
        let eq = inst(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]);
        assert_eq!(initial_pair(&eq, EPS).len(), 3);
    }

    #[test]
    fn initial_triangle_examples() {
        let sq = inst(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(initial_triangle(&sq, [0, 3], EPS).unwrap().candidates, vec![1, 2]);
        let far = inst(&[(0.0, 0.0), (10.0, 0.0), (5.0, 1.0), (5.0, 6.0)]);
        assert_eq!(initial_triangle(&far, [0, 1], EPS).unwrap().candidates, vec![3]);
        assert_eq!(initial_triangle(&far, [1, 1], EPS), Err(HeuristicError::DegeneratePair));
    }

    #[test]
    fn maxmin_single_outside_point() {
        let pts = [(0.0, 0.0), (10.0, 0.0), (5.0, 8.0), (5.0, 1.0)];
        let i = inst(&pts);
        let t = Tour::new(vec![0, 1, 2]);
        let ties = maxmin_step(&i, &t, EPS).unwrap();
        // one candidate per edge; compute all three by hand
        let by_hand: Vec<f64> = (0..3)
            .map(|k| {
                let (a, b) = (pts[k], pts[(k + 1) % 3]);
                hypot(a, pts[3]) + hypot(pts[3], b) - hypot(a, b)
            })
            .collect();
        let best = by_hand.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let expect: Vec<usize> = (0..3).filter(|&k| by_hand[k] >= best - EPS).collect();
        // the point sits on the symmetry axis, so the two slanted edges tie
        assert_eq!(expect, vec![1, 2]);
        assert_eq!(ties.candidates.iter().map(|c| c.position).collect::<Vec<_>>(), expect);
        for c in &ties.candidates {
            assert!((c.delta - by_hand[c.position]).abs() < 1e-12);
        }
        assert_eq!(ties.chosen().position, 1);
        assert!((by_hand[0] - (2.0 * 26f64.sqrt() - 10.0)).abs() < 1e-12);
    }

    #[test]
    fn equilateral_centroid_ties_three_ways() {
        let h = 3f64.sqrt() / 2.0;
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (0.5, h), (0.5, h / 3.0)]);
        let t = Tour::new(vec![0, 1, 2]);
        assert_eq!(maxmin_step(&i, &t, EPS).unwrap().len(), 3);
        assert_eq!(minmin_step(&i, &t, EPS).unwrap().len(), 3);
    }

    #[test]
    fn minmin_prefers_the_flat_point() {
        let pts = [(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (2.0, 0.1), (2.0, 2.9)];
        let i = inst(&pts);
        let t = Tour::new(vec![0, 1, 2]);
        let mut all = Vec::new();
        for k in 0..3 {
            for p in [3, 4] {
                let (a, b) = (pts[k], pts[(k + 1) % 3]);
                all.push((hypot(a, pts[p]) + hypot(pts[p], b) - hypot(a, b), k, p));
            }
        }
        let (min, k, p) = all.iter().copied().fold((f64::INFINITY, 0, 0), |m, c| if c.0 < m.0 { c } else { m });
        assert_eq!((k, p), (0, 3));
        assert!((min - 0.005).abs() < 1e-4);
        let ties = minmin_step(&i, &t, EPS).unwrap();
        assert_eq!(ties.len(), 1);
        assert_eq!((ties.chosen().position, ties.chosen().point), (0, 3));
        assert!((ties.chosen().delta - min).abs() < 1e-12);
    }

    #[test]
    fn point_on_edge_costs_nothing() {
        let i = inst(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0), (1.0, 0.0), (2.0, 1.0)]);
        let ties = minmin_step(&i, &Tour::new(vec![0, 1, 2]), EPS).unwrap();
        assert_eq!(ties.chosen().point, 3);
        assert_eq!(ties.chosen().delta, 0.0);
    }

    #[test]
    fn square_center_ties_four_ways() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]);
        let t = Tour::new(vec![0, 1, 2, 3]);
        assert_eq!(minmin_step(&i, &t, EPS).unwrap().len(), 4);
        assert_eq!(maxmin_step(&i, &t, EPS).unwrap().len(), 4);
    }

    #[test]
    fn step_errors() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        assert_eq!(maxmin_step(&i, &Tour::new(vec![0, 1, 2, 3]), EPS), Err(HeuristicError::TourComplete));
        assert_eq!(minmin_step(&i, &Tour::new(vec![0, 1]), EPS), Err(HeuristicError::TourTooShort(2)));
        assert!(matches!(maxmin_step(&i, &Tour::new(vec![0, 1, 1]), EPS), Err(HeuristicError::InvalidTour(_))));
    }

    #[test]
    fn three_points_need_no_insertions() {
        let i = inst(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        let run = run_adding(&i, Variant::MaxMin, EPS).unwrap();
        assert!(run.steps.is_empty());
        assert_eq!(run.final_tour.order(), &[1, 2, 0]);
        assert_eq!(run.final_length, 12.0);
        assert_eq!(run.replay(), run.final_tour);
    }

    #[test]
    fn scripted_choice_out_of_range() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        let err = run_adding_with(&i, Variant::MaxMin, EPS, &mut Scripted(&[5])).unwrap_err();
        assert_eq!(err, HeuristicError::ChoiceOutOfRange { decision: 0, choice: 5, ties: 2 });
        let alt = run_adding_with(&i, Variant::MaxMin, EPS, &mut Scripted(&[1, 1])).unwrap();
        assert_eq!(alt.triangle(), [1, 2, 3]);
        assert_eq!(alt.replay(), alt.final_tour);
    }

    #[test]
    fn cutting_examples() {
        // square with a point on the midpoint of its bottom edge
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.0)]);
        let t = Tour::new(vec![0, 4, 1, 2, 3]);
        let (reduced, ties) = cut_step(&i, &t, EPS).unwrap();
        assert_eq!(ties.chosen().point, 4);
        assert_eq!(ties.chosen().delta, 0.0);
        assert_eq!(reduced.order(), &[0, 1, 2, 3]);
        let trace = run_cutting(&i, &t, EPS).unwrap();
        assert_eq!(trace.removed[0], 4);
        assert_eq!(trace.final_tour.len(), 3);

        let tri = inst(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        let trace = run_cutting(&tri, &Tour::new(vec![0, 1, 2]), EPS).unwrap();
        assert!(trace.removed.is_empty());
        assert_eq!(cut_step(&tri, &Tour::new(vec![0, 1, 2]), EPS).unwrap_err(), HeuristicError::TourTooSmall(3));
        assert!(matches!(run_cutting(&i, &Tour::new(vec![0, 1, 2]), EPS), Err(HeuristicError::InvalidTour(_))));
    }

    #[test]
    fn regular_pentagon_cut_ties() {
        let pts: Vec<(f64, f64)> = (0..5)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * f64::from(k) / 5.0;
                (a.cos(), a.sin())
            })
            .collect();
        let i = inst(&pts);
        let (_, ties) = cut_step(&i, &Tour::new(vec![0, 1, 2, 3, 4]), EPS).unwrap();
        assert_eq!(ties.len(), 5);
        assert_eq!(ties.chosen().point, 0);
    }

    #[test]
    fn cut_length_identity() {
        let i = inst(&[(0.0, 0.0), (4.0, 1.0), (5.0, 5.0), (1.0, 4.0), (2.0, 2.5), (3.0, 0.5)]);
        let t = Tour::new(vec![0, 5, 1, 2, 4, 3]);
        let before = tour_length(&i, &t).unwrap();
        let (reduced, ties) = cut_step(&i, &t, EPS).unwrap();
        let c = ties.chosen();
        let m = t.len();
        let (a, b, nx) = (t.order()[(c.position + m - 1) % m], c.point, t.order()[(c.position + 1) % m]);
        let expect = before - i.d(a, b) - i.d(b, nx) + i.d(a, nx);
        assert!((tour_length(&i, &reduced).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn triangle_trivially_corresponds() {
        let i = inst(&[(0.0, 0.0), (3.0, 0.0), (0.0, 4.0)]);
        let rep = inverse_correspondence(&i, EPS).unwrap();
        assert!(rep.removal_order.is_empty());
        assert!(rep.maxmin.orders_match && rep.minmin.orders_match);
        assert!(rep.maxmin.reaches_optimum);
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("maxmin".parse::<Variant>(), Ok(Variant::MaxMin));
        assert_eq!("min-min".parse::<Variant>(), Ok(Variant::MinMin));
        assert!("maxmax".parse::<Variant>().is_err());
        assert_eq!(serde_json::to_string(&Variant::MinMin).unwrap(), "\"minmin\"");
    }

    #[test]
    fn non_metric_matrix_runs() {
        // d(0,1) = 10 breaks the triangle inequality through point 3
        let m = Instance::from_matrix(vec![
            vec![0.0, 10.0, 3.0, 1.0],
            vec![10.0, 0.0, 3.0, 1.0],
            vec![3.0, 3.0, 0.0, 3.0],
            vec![1.0, 1.0, 3.0, 0.0],
        ])
        .unwrap();
        let run = run_adding(&m, Variant::MinMin, EPS).unwrap();
        assert_eq!(run.steps[0].chosen().delta, -8.0);
        assert_eq!(run.final_length, 10.0 - 8.0 + 3.0 + 3.0);
        let run = run_adding(&m, Variant::MaxMin, EPS).unwrap();
        assert_eq!(run.steps[0].chosen().delta, 1.0);
    }
}
