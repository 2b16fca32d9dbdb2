use std::collections::HashMap;

use crate::game::GameKind;
use crate::lp::{LpProblem, Relation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// Game entity a variable stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Entity {
    /// `level` followers of `class` on `resource`.
    Q { class: usize, resource: usize, level: usize },
    /// `level` followers in total on `resource`.
    Y { resource: usize, level: usize },
    /// Product of `Y` and the leader's probability on `resource`.
    Z { resource: usize, level: usize },
    /// Leader probability on a resource (singleton leader actions).
    AlphaResource { resource: usize },
    /// Leader probability of an action.
    AlphaAction { action: usize },
    /// Follower plays her `action`-th action.
    X { follower: usize, action: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub entity: Entity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MilpConstraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

/// Solver-independent minimization model.
#[derive(Clone, Debug, PartialEq)]
pub struct MilpModel {
    pub kind: GameKind,
    pub variables: Vec<Variable>,
    pub constraints: Vec<MilpConstraint>,
    pub objective: Vec<(usize, f64)>,
    /// Constant used to switch NE rows off.
    pub big_m: f64,
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub(crate) fn new(kind: GameKind, big_m: f64) -> Self {
        MilpModel {
            kind,
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: Vec::new(),
            big_m,
            index: HashMap::new(),
        }
    }

    pub(crate) fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64, entity: Entity) -> usize {
        let k = self.variables.len();
        debug_assert!(!self.index.contains_key(&name), "duplicate variable {name}");
        self.index.insert(name.clone(), k);
        self.variables.push(Variable { name, kind, lower, upper, entity });
        k
    }

    /// Adds a row, merging repeated variables and dropping zero terms.
    pub(crate) fn add_row(&mut self, name: String, terms: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        let mut terms = terms;
        terms.sort_by_key(|&(k, _)| k);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (k, a) in terms {
            match merged.last_mut() {
                Some((lk, la)) if *lk == k => *la += a,
                _ => merged.push((k, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        self.constraints.push(MilpConstraint { name, coeffs: merged, relation, rhs });
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn binaries(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.kind == VarKind::Binary).map(|(k, _)| k)
    }

    pub fn count(&self, pred: impl Fn(&Entity) -> bool) -> usize {
        self.variables.iter().filter(|v| pred(&v.entity)).count()
    }

    pub fn evaluate(&self, values: &[f64]) -> f64 {
        self.objective.iter().map(|&(k, c)| c * values[k]).sum()
    }

    /// Largest row or bound violation at `values`.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        self.relaxation().max_violation(values)
    }

    /// Largest distance of a binary from the nearest integer.
    pub fn max_fractionality(&self, values: &[f64]) -> f64 {
        self.binaries().map(|k| (values[k] - values[k].round()).abs()).fold(0.0, f64::max)
    }

    /// The continuous relaxation.
    pub fn relaxation(&self) -> LpProblem {
        let mut lp = LpProblem::new(self.variables.len());
        for &(k, c) in &self.objective {
            lp.objective[k] += c;
        }
        for (k, v) in self.variables.iter().enumerate() {
            lp.lower[k] = v.lower;
            lp.upper[k] = v.upper;
        }
        for c in &self.constraints {
            lp.add(c.coeffs.clone(), c.relation, c.rhs);
        }
        lp
    }
}
