//! Enumeration of every run reachable by resolving ties every possible way.
//!
//! The tree has one level per decision: initial pair (depth 0), third point
//! (depth 1), then one insertion per level, so a node's depth is the number of
//! points on its partial route minus two. Leaves are complete tours.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};

use crate::heuristic::{
    apply_insertion, initial_pair, initial_triangle, insertion_step, run_adding, HeuristicError, Variant,
};
use crate::instance::{canonical_order, tour_length_unchecked, Instance, InstanceError, PointId, Tour};

pub const DEFAULT_MAX_NODES: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerateOptions {
    pub max_nodes: usize,
    pub max_depth: Option<usize>,
    /// Merge partial routes equal up to rotation and reflection. Off by default:
    /// the adding procedure itself has no such pruning.
    pub dedup: bool,
    /// Keep every leaf with its choice sequence.
    pub record_leaves: bool,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
            max_depth: None,
            dedup: false,
            record_leaves: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchReport {
    pub variant: Variant,
    pub eps: f64,
    pub n: usize,
    pub nodes_per_depth: Vec<usize>,
    pub total_nodes: usize,
    pub leaves: usize,
    pub distinct_final_tours: usize,
    pub best_final_length: Option<f64>,
    pub worst_final_length: Option<f64>,
    pub truncated: bool,
    pub dedup_enabled: bool,
    pub dedup_hits: usize,
}

impl BranchReport {
    /// Branches after the initial pair and third point have been fixed.
    pub fn root_branches(&self) -> usize {
        self.nodes_per_depth.get(1).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaf {
    /// Index taken at each decision, replayable with [`crate::heuristic::Scripted`].
    pub choices: Vec<usize>,
    pub tour: Tour,
    pub length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub report: BranchReport,
    /// Canonical final tours with their lengths.
    pub final_tours: BTreeMap<Tour, f64>,
    pub leaves: Vec<Leaf>,
}

struct Walker<'a> {
    inst: &'a Instance,
    variant: Variant,
    eps: f64,
    opts: EnumerateOptions,
    nodes_per_depth: Vec<usize>,
    total: usize,
    truncated: bool,
    visited: HashSet<Vec<PointId>>,
    dedup_hits: usize,
    choices: Vec<usize>,
    final_tours: BTreeMap<Tour, f64>,
    leaves: Vec<Leaf>,
    leaf_count: usize,
}

impl Walker<'_> {
    /// Accounts for a new node; `false` means it must not be expanded.
    fn enter(&mut self, depth: usize, route: &[PointId]) -> bool {
        if self.truncated {
            return false;
        }
        if self.opts.max_depth.is_some_and(|d| depth > d) || self.total >= self.opts.max_nodes {
            self.truncated = true;
            return false;
        }
        if self.opts.dedup && !self.visited.insert(canonical_order(route)) {
            self.dedup_hits += 1;
            return false;
        }
        if self.nodes_per_depth.len() <= depth {
            self.nodes_per_depth.resize(depth + 1, 0);
        }
        self.nodes_per_depth[depth] += 1;
        self.total += 1;
        true
    }

    fn run(&mut self) -> Result<(), HeuristicError> {
        let pairs = initial_pair(self.inst, self.eps);
        for (i, &pair) in pairs.candidates.iter().enumerate() {
            if !self.enter(0, &pair) {
                continue;
            }
            self.choices.push(i);
            let thirds = initial_triangle(self.inst, pair, self.eps)?;
            for (j, &c) in thirds.candidates.iter().enumerate() {
                let tour = Tour::new(vec![pair[0], pair[1], c]);
                if self.enter(1, tour.order()) {
                    self.choices.push(j);
                    self.descend(tour, 1)?;
                    self.choices.pop();
                }
            }
            self.choices.pop();
        }
        Ok(())
    }

    fn descend(&mut self, tour: Tour, depth: usize) -> Result<(), HeuristicError> {
        if tour.len() == self.inst.len() {
            self.leaf(tour);
            return Ok(());
        }
        let ties = insertion_step(self.inst, &tour, self.variant, self.eps)?;
        for (k, c) in ties.candidates.iter().enumerate() {
            let child = apply_insertion(&tour, c);
            if self.enter(depth + 1, child.order()) {
                self.choices.push(k);
                self.descend(child, depth + 1)?;
                self.choices.pop();
            }
            if self.truncated {
                break;
            }
        }
        Ok(())
    }

    fn leaf(&mut self, tour: Tour) {
        let length = tour_length_unchecked(self.inst, tour.order());
        self.leaf_count += 1;
        self.final_tours.entry(tour.canonical()).or_insert(length);
        if self.opts.record_leaves {
            self.leaves.push(Leaf {
                choices: self.choices.clone(),
                tour,
                length,
            });
        }
    }
}

/// Depth-first exploration of every tie resolution.
///
/// Hitting `max_nodes` or `max_depth` is not an error: the report comes back
/// with `truncated` set and the counts gathered so far.
pub fn enumerate_runs(
    inst: &Instance,
    variant: Variant,
    eps: f64,
    opts: EnumerateOptions,
) -> Result<Enumeration, HeuristicError> {
    if inst.len() < 3 {
        return Err(InstanceError::TooFewPoints(inst.len()).into());
    }
    let mut w = Walker {
        inst,
        variant,
        eps,
        opts,
        nodes_per_depth: Vec::new(),
        total: 0,
        truncated: false,
        visited: HashSet::new(),
        dedup_hits: 0,
        choices: Vec::new(),
        final_tours: BTreeMap::new(),
        leaves: Vec::new(),
        leaf_count: 0,
    };
    w.run()?;
    let lengths = || w.final_tours.values().copied();
    let report = BranchReport {
        variant,
        eps,
        n: inst.len(),
        nodes_per_depth: w.nodes_per_depth.clone(),
        total_nodes: w.total,
        leaves: w.leaf_count,
        distinct_final_tours: w.final_tours.len(),
        best_final_length: lengths().reduce(f64::min),
        worst_final_length: lengths().reduce(f64::max),
        truncated: w.truncated,
        dedup_enabled: opts.dedup,
        dedup_hits: w.dedup_hits,
    };
    Ok(Enumeration {
        report,
        final_tours: w.final_tours,
        leaves: w.leaves,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TieProfile {
    pub initial_pair: usize,
    pub initial_third: usize,
    pub steps: Vec<usize>,
}

impl TieProfile {
    pub fn max(&self) -> usize {
        self.steps.iter().copied().chain([self.initial_pair, self.initial_third]).max().unwrap_or(1)
    }
}

/// Tie-set sizes along the single deterministic run.
pub fn tie_profile(inst: &Instance, variant: Variant, eps: f64) -> Result<TieProfile, HeuristicError> {
    let run = run_adding(inst, variant, eps)?;
    Ok(TieProfile {
        initial_pair: run.initial_pair.len(),
        initial_third: run.initial_third.len(),
        steps: run.steps.iter().map(|s| s.len()).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub k: usize,
    pub n: usize,
    pub total_nodes: usize,
    pub leaves: usize,
    pub distinct_final_tours: usize,
    pub truncated: bool,
}

/// Raw node and leaf counts per grid side; no curve fitting.
pub fn growth_estimate(reports: &[(usize, BranchReport)]) -> Option<Vec<GrowthRow>> {
    if reports.len() < 2 {
        return None;
    }
    let mut rows: Vec<GrowthRow> = reports
        .iter()
        .map(|(k, r)| GrowthRow {
            k: *k,
            n: r.n,
            total_nodes: r.total_nodes,
            leaves: r.leaves,
            distinct_final_tours: r.distinct_final_tours,
            truncated: r.truncated,
        })
        .collect();
    rows.sort_by_key(|r| r.k);
    Some(rows)
}
