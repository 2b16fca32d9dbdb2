use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::lp::{solve_lp, LpStatus};

use super::model::MilpModel;
use super::MilpError;

/// A binary within this distance of an integer counts as integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct MilpParams {
    pub time_limit: Option<Duration>,
    /// Relative gap `(UB − LB)/|UB|` at which a node is pruned.
    pub gap_tol: f64,
    pub node_limit: Option<usize>,
    /// Starting incumbent; ignored unless integral and feasible within 1e-6.
    pub initial: Option<Vec<f64>>,
}

impl Default for MilpParams {
    fn default() -> Self {
        MilpParams { time_limit: None, gap_tol: 1e-9, node_limit: None, initial: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    Timeout,
}

impl MilpStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            MilpStatus::Optimal => "Optimal",
            MilpStatus::Infeasible => "Infeasible",
            MilpStatus::Unbounded => "Unbounded",
            MilpStatus::Timeout => "Timeout",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpSolution {
    pub status: MilpStatus,
    /// Incumbent values, if one was found.
    pub values: Option<Vec<f64>>,
    /// Incumbent objective (upper bound).
    pub objective: Option<f64>,
    /// Proven lower bound on the optimum.
    pub lower_bound: f64,
    /// `(UB − LB)/|UB|`; `None` without an incumbent.
    pub gap: Option<f64>,
    pub nodes: usize,
    /// Largest amount by which a child's relaxation fell below its parent's
    /// (zero up to LP round-off).
    pub max_bound_drop: f64,
}

/// `(UB − LB)/|UB|`, zero when the bounds meet.
pub fn relative_gap(upper: f64, lower: f64) -> f64 {
    if upper - lower <= 0.0 {
        0.0
    } else if upper == 0.0 {
        f64::INFINITY
    } else {
        (upper - lower) / upper.abs()
    }
}

struct Node {
    fixings: Vec<(usize, f64)>,
    bound: f64,
    seq: usize,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // smallest bound, then deepest, then most recent
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| self.fixings.len().cmp(&other.fixings.len()))
            .then_with(|| self.seq.cmp(&other.seq))
    }
}

/// Best-bound branch and bound on the most fractional binary. Deadlines are
/// checked between nodes.
pub fn solve_milp(model: &MilpModel, params: &MilpParams) -> Result<MilpSolution, MilpError> {
    let start = Instant::now();
    let base = model.relaxation();
    let binaries: Vec<usize> = model.binaries().collect();
    let mut heap = BinaryHeap::new();
    heap.push(Node { fixings: Vec::new(), bound: f64::NEG_INFINITY, seq: 0 });
    let mut seq = 1;
    let mut incumbent: Option<(f64, Vec<f64>)> = params.initial.as_ref().and_then(|x| {
        let usable = x.len() == model.variables.len()
            && model.max_violation(x) <= 1e-6
            && model.max_fractionality(x) <= INTEGRALITY_TOL;
        usable.then(|| (model.evaluate(x), x.clone()))
    });
    let mut nodes = 0;
    let mut max_bound_drop: f64 = 0.0;
    let mut stopped = false;

    let prune_tol = |ub: f64| (params.gap_tol * ub.abs()).max(1e-9);

    while !heap.is_empty() {
        let out_of_time = params.time_limit.is_some_and(|t| start.elapsed() >= t);
        let out_of_nodes = params.node_limit.is_some_and(|n| nodes >= n);
        if out_of_time || out_of_nodes {
            stopped = true;
            break;
        }
        let node = heap.pop().expect("non-empty");
        if let Some((ub, _)) = &incumbent {
            if node.bound >= ub - prune_tol(*ub) {
                continue;
            }
        }
        let mut lp = base.clone();
        for &(k, v) in &node.fixings {
            lp.lower[k] = v;
            lp.upper[k] = v;
        }
        let sol = solve_lp(&lp)?;
        nodes += 1;
        match sol.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(MilpSolution {
                    status: MilpStatus::Unbounded,
                    values: None,
                    objective: None,
                    lower_bound: f64::NEG_INFINITY,
                    gap: None,
                    nodes,
                    max_bound_drop,
                })
            }
            LpStatus::Optimal => {}
        }
        if node.bound.is_finite() {
            max_bound_drop = max_bound_drop.max(node.bound - sol.objective);
        }
        if let Some((ub, _)) = &incumbent {
            if sol.objective >= ub - prune_tol(*ub) {
                continue;
            }
        }
        let branch = binaries
            .iter()
            .map(|&k| (k, (sol.x[k] - sol.x[k].round()).abs()))
            .filter(|&(_, f)| f > INTEGRALITY_TOL)
            .fold(None::<(usize, f64)>, |best, (k, f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((k, f)),
            });
        match branch {
            None => {
                let mut x = sol.x;
                for &k in &binaries {
                    x[k] = x[k].round();
                }
                incumbent = Some((sol.objective, x));
            }
            Some((k, _)) => {
                for v in [0.0, 1.0] {
                    let mut fixings = node.fixings.clone();
                    fixings.push((k, v));
                    heap.push(Node { fixings, bound: sol.objective, seq });
                    seq += 1;
                }
            }
        }
    }

    let (status, lower_bound) = if stopped {
        let open = heap.iter().map(|n| n.bound).fold(f64::INFINITY, f64::min);
        let lb = match &incumbent {
            Some((ub, _)) => open.min(*ub),
            None => open,
        };
        (MilpStatus::Timeout, lb)
    } else {
        match &incumbent {
            Some((ub, _)) => (MilpStatus::Optimal, *ub),
            None => (MilpStatus::Infeasible, f64::INFINITY),
        }
    };
    let gap = incumbent.as_ref().map(|(ub, _)| relative_gap(*ub, lower_bound));
    let (objective, values) = match incumbent {
        Some((ub, x)) => (Some(ub), Some(x)),
        None => (None, None),
    };
    Ok(MilpSolution { status, values, objective, lower_bound, gap, nodes, max_bound_drop })
}
