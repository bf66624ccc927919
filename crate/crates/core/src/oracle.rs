//! Exact optimal tours for small instances.
//!
//! Two independent solvers: exhaustive enumeration of canonical tours and the
//! Held-Karp bitmask dynamic program. Each one checks the other.

use serde::{Deserialize, Serialize};

use thiserror::Error;

use crate::instance::{tour_length_unchecked, Instance, PointId, Tour};

pub const PERMUTATION_LIMIT: usize = 12;
pub const DP_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("{method} oracle supports at most {limit} points, instance has {n}")]
    TooLarge { method: Method, n: usize, limit: usize },
    #[error("oracle needs at least 3 points, got {0}")]
    TooSmall(usize),
    #[error("optimal length must be positive, got {0}")]
    NonPositiveOptimal(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Permutation,
    Dp,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Permutation => "permutation",
            Method::Dp => "dp",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalResult {
    pub tour: Tour,
    pub length: f64,
    pub method: Method,
}

fn check_size(inst: &Instance, method: Method, limit: usize) -> Result<(), OracleError> {
    let n = inst.len();
    if n < 3 {
        Err(OracleError::TooSmall(n))
    } else if n > limit {
        Err(OracleError::TooLarge { method, n, limit })
    } else {
        Ok(())
    }
}

/// Exhaustive search over all `(n-1)!/2` tours starting at point 0.
///
/// Tours are visited in lexicographic order and only replaced on strict
/// improvement, so the result is the lexicographically smallest canonical
/// optimum.
pub fn optimal_permutation(inst: &Instance) -> Result<OptimalResult, OracleError> {
    optimal_permutation_capped(inst, PERMUTATION_LIMIT)
}

pub fn optimal_permutation_capped(inst: &Instance, limit: usize) -> Result<OptimalResult, OracleError> {
    check_size(inst, Method::Permutation, limit)?;
    let n = inst.len();
    let mut search = PermSearch {
        inst,
        order: vec![0],
        used: vec![false; n],
        best: f64::INFINITY,
        best_order: Vec::new(),
    };
    search.used[0] = true;
    search.extend(0.0);
    Ok(OptimalResult {
        length: tour_length_unchecked(inst, &search.best_order),
        tour: Tour::new(search.best_order),
        method: Method::Permutation,
    })
}

struct PermSearch<'a> {
    inst: &'a Instance,
    order: Vec<PointId>,
    used: Vec<bool>,
    best: f64,
    best_order: Vec<PointId>,
}

impl PermSearch<'_> {
    fn extend(&mut self, partial: f64) {
        let n = self.inst.len();
        let last = *self.order.last().expect("tour starts at 0");
        if self.order.len() == n {
            // one direction per cycle
            if self.order[1] > last {
                return;
            }
            let total = partial + self.inst.d(last, 0);
            if total < self.best {
                self.best = total;
                self.best_order.clone_from(&self.order);
            }
            return;
        }
        for p in 1..n {
            if !self.used[p] {
                self.used[p] = true;
                self.order.push(p);
                self.extend(partial + self.inst.d(last, p));
                self.order.pop();
                self.used[p] = false;
            }
        }
    }
}

/// Held-Karp dynamic program over subsets of points `1..n`.
pub fn optimal_dp(inst: &Instance) -> Result<OptimalResult, OracleError> {
    optimal_dp_capped(inst, DP_LIMIT)
}

pub fn optimal_dp_capped(inst: &Instance, limit: usize) -> Result<OptimalResult, OracleError> {
    check_size(inst, Method::Dp, limit)?;
    let n = inst.len();
    let m = n - 1; // point i + 1 is bit i
    let full = 1usize << m;
    // cost[mask * m + j]: shortest path 0 -> ... -> j+1 visiting exactly `mask`
    let mut cost = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for j in 0..m {
        cost[(1 << j) * m + j] = inst.d(0, j + 1);
    }
    for mask in 1..full {
        for j in 0..m {
            if mask & (1 << j) == 0 {
                continue;
            }
            let here = cost[mask * m + j];
            if here == f64::INFINITY {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let c = here + inst.d(j + 1, k + 1);
                if c < cost[next * m + k] {
                    cost[next * m + k] = c;
                    parent[next * m + k] = j as u8;
                }
            }
        }
    }
    let last_mask = full - 1;
    let (mut j, _) = (0..m)
        .map(|j| (j, cost[last_mask * m + j] + inst.d(j + 1, 0)))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let mut order = Vec::with_capacity(n);
    let mut mask = last_mask;
    loop {
        order.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == u8::MAX {
            break;
        }
        j = p as usize;
    }
    order.push(0);
    order.reverse();
    let tour = Tour::new(order).canonical();
    Ok(OptimalResult {
        length: tour_length_unchecked(inst, tour.order()),
        tour,
        method: Method::Dp,
    })
}

/// The cheapest applicable oracle: Held-Karp up to its size cap.
pub fn optimal(inst: &Instance) -> Result<OptimalResult, OracleError> {
    optimal_dp(inst)
}

/// Relative excess of a heuristic length over the optimum.
pub fn gap(heuristic_length: f64, optimal_length: f64) -> Result<f64, OracleError> {
    if optimal_length <= 0.0 || !optimal_length.is_finite() {
        return Err(OracleError::NonPositiveOptimal(optimal_length));
    }
    Ok((heuristic_length - optimal_length) / optimal_length)
}
