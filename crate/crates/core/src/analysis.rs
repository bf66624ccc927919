//! Self-intersection ("loop") detection, 2-opt uncrossing, and the loop-rate experiment.

use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::generators::gen_random_uniform_stream;
use crate::heuristic::{run_adding, HeuristicError, Variant};
use crate::instance::{tour_length_unchecked, Edge, Instance, InstanceError, Point, Tour};

/// Absolute tolerance on the orientation determinant below which three points count as collinear.
pub const ORIENT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error("crossing edges {0} and {1} are no longer on the tour")]
    CrossingStale(Edge, Edge),
    #[error("crossing edges must be distinct tour positions")]
    BadCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Sign of the turn `a -> b -> c`, treating |det| <= [`ORIENT_EPS`] as collinear.
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if det > ORIENT_EPS {
        Orientation::CounterClockwise
    } else if det < -ORIENT_EPS {
        Orientation::Clockwise
    } else {
        Orientation::Collinear
    }
}

fn within_box(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) - ORIENT_EPS
        && p.x <= a.x.max(b.x) + ORIENT_EPS
        && p.y >= a.y.min(b.y) - ORIENT_EPS
        && p.y <= a.y.max(b.y) + ORIENT_EPS
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentContact {
    /// Interiors cross at a single point.
    Proper(Point),
    /// Segments touch at an endpoint or overlap collinearly.
    Degenerate(Point),
}

/// Classifies how closed segments `p1q1` and `p2q2` meet, if at all.
pub fn segment_contact(p1: Point, q1: Point, p2: Point, q2: Point) -> Option<SegmentContact> {
    use Orientation::Collinear;
    let o1 = orientation(p1, q1, p2);
    let o2 = orientation(p1, q1, q2);
    let o3 = orientation(p2, q2, p1);
    let o4 = orientation(p2, q2, q1);

    if o1 != Collinear && o2 != Collinear && o3 != Collinear && o4 != Collinear {
        if o1 != o2 && o3 != o4 {
            let (rx, ry) = (q1.x - p1.x, q1.y - p1.y);
            let (sx, sy) = (q2.x - p2.x, q2.y - p2.y);
            let t = ((p2.x - p1.x) * sy - (p2.y - p1.y) * sx) / (rx * sy - ry * sx);
            return Some(SegmentContact::Proper(Point::new(p1.x + t * rx, p1.y + t * ry)));
        }
        return None;
    }
    if o1 == Collinear && within_box(p2, p1, q1) {
        return Some(SegmentContact::Degenerate(p2));
    }
    if o2 == Collinear && within_box(q2, p1, q1) {
        return Some(SegmentContact::Degenerate(q2));
    }
    if o3 == Collinear && within_box(p1, p2, q2) {
        return Some(SegmentContact::Degenerate(p1));
    }
    if o4 == Collinear && within_box(q1, p2, q2) {
        return Some(SegmentContact::Degenerate(q1));
    }
    None
}

/// Two non-adjacent tour edges that meet in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    /// Tour positions of the edges, `first < second`.
    pub first: usize,
    pub second: usize,
    pub edge1: Edge,
    pub edge2: Edge,
    pub point: (f64, f64),
    /// Touching or collinear overlap rather than a proper crossing.
    pub degenerate: bool,
}

/// All pairs of non-adjacent tour edges whose closed segments meet.
pub fn find_crossings(inst: &Instance, t: &Tour) -> Result<Vec<Crossing>, AnalysisError> {
    let coords = inst.require_coords()?;
    for &p in t.order() {
        inst.check_id(p)?;
    }
    let m = t.len();
    let mut out = Vec::new();
    if m < 4 {
        return Ok(out);
    }
    let edges: Vec<Edge> = t.edges().collect();
    let segs: Vec<(Point, Point)> = edges.iter().map(|e| (coords[e.a], coords[e.b])).collect();
    let boxes: Vec<[f64; 4]> = segs
        .iter()
        .map(|(a, b)| [a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y)])
        .collect();
    for i in 0..m {
        // edges i and i+1 share a tour position; so do the last and first
        let last = if i == 0 { m - 1 } else { m };
        for j in (i + 2)..last {
            let (bi, bj) = (&boxes[i], &boxes[j]);
            if bi[1] + ORIENT_EPS < bj[0]
                || bj[1] + ORIENT_EPS < bi[0]
                || bi[3] + ORIENT_EPS < bj[2]
                || bj[3] + ORIENT_EPS < bi[2]
            {
                continue;
            }
            let ((p1, q1), (p2, q2)) = (segs[i], segs[j]);
            if let Some(contact) = segment_contact(p1, q1, p2, q2) {
                let (point, degenerate) = match contact {
                    SegmentContact::Proper(p) => (p, false),
                    SegmentContact::Degenerate(p) => (p, true),
                };
                out.push(Crossing {
                    first: i,
                    second: j,
                    edge1: edges[i],
                    edge2: edges[j],
                    point: (point.x, point.y),
                    degenerate,
                });
            }
        }
    }
    Ok(out)
}

/// 2-opt move across a crossing: reverses the path between the two edges.
pub fn uncross(inst: &Instance, t: &Tour, c: &Crossing) -> Result<Tour, AnalysisError> {
    let m = t.len();
    if c.first >= c.second || c.second >= m {
        return Err(AnalysisError::BadCrossing);
    }
    for &p in t.order() {
        inst.check_id(p)?;
    }
    if t.edge(c.first) != c.edge1 || t.edge(c.second) != c.edge2 {
        return Err(AnalysisError::CrossingStale(c.edge1, c.edge2));
    }
    let mut order = t.order().to_vec();
    order[c.first + 1..=c.second].reverse();
    Ok(Tour::new(order))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Untangled {
    pub tour: Tour,
    pub moves: usize,
    pub initial_length: f64,
    pub final_length: f64,
}

/// Applies improving uncross moves until no crossing shortens the tour.
///
/// Sweeps edge pairs in place and reverses as soon as a meeting pair gives a
/// strictly shorter tour; repeats until a sweep makes no move.
pub fn untangle(inst: &Instance, t: &Tour) -> Result<Untangled, AnalysisError> {
    let coords = inst.require_coords()?;
    for &p in t.order() {
        inst.check_id(p)?;
    }
    let initial_length = tour_length_unchecked(inst, t.order());
    let mut order = t.order().to_vec();
    let mut length = initial_length;
    let mut moves = 0;
    let m = order.len();
    let mut improved = m >= 4;
    while improved {
        improved = false;
        for i in 0..m {
            let last = if i == 0 { m - 1 } else { m };
            for j in (i + 2)..last {
                let (a, b, c, d) = (order[i], order[i + 1], order[j], order[(j + 1) % m]);
                if segment_contact(coords[a], coords[b], coords[c], coords[d]).is_none()
                    || inst.d(a, b) + inst.d(c, d) <= inst.d(a, c) + inst.d(b, d)
                {
                    continue;
                }
                order[i + 1..=j].reverse();
                let next = tour_length_unchecked(inst, &order);
                if next < length {
                    length = next;
                    moves += 1;
                    improved = true;
                } else {
                    order[i + 1..=j].reverse();
                }
            }
        }
    }
    Ok(Untangled {
        tour: Tour::new(order),
        moves,
        initial_length,
        final_length: length,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopRateReport {
    pub n: usize,
    pub trials: usize,
    pub variant: Variant,
    pub with_crossings: usize,
    pub rate: f64,
    /// Mean over all trials of `(before - after) / before` from [`untangle`].
    pub mean_uncross_improvement: f64,
    pub seed: u64,
}

/// Runs the deterministic adding procedure on `trials` uniform instances and
/// counts how many final tours cross themselves.
///
/// Trial `i` uses stream `i` of the seeded generator, so results do not
/// depend on execution order.
pub fn loop_rate_experiment(
    n: usize,
    trials: usize,
    variant: Variant,
    seed: u64,
    eps: f64,
) -> Result<LoopRateReport, AnalysisError> {
    let mut with_crossings = 0;
    let mut improvement = 0.0;
    for trial in 0..trials {
        let inst = gen_random_uniform_stream(n, seed, trial as u64)?;
        let run = run_adding(&inst, variant, eps)?;
        if !find_crossings(&inst, &run.final_tour)?.is_empty() {
            with_crossings += 1;
            let u = untangle(&inst, &run.final_tour)?;
            improvement += (u.initial_length - u.final_length) / u.initial_length;
        }
    }
    let denom = trials.max(1) as f64;
    Ok(LoopRateReport {
        n,
        trials,
        variant,
        with_crossings,
        rate: with_crossings as f64 / denom,
        mean_uncross_improvement: improvement / denom,
        seed,
    })
}
