//! Dynamic program for optimal pure NEs of T-class singleton congestion
//! games, and the pure-leader OSE solvers built on it.
//!
//! Resources are processed in index order. A table entry `O(i, B, M, V)` is
//! the best criterion value over assignments of `B_t` followers of each class
//! `t` to the first `i` resources such that the assignment is an NE among
//! those resources, every cost experienced by a class-`t` follower is at most
//! `ladder[M_t]`, and every cost a class-`t` follower would pay by moving to
//! one of those resources is at least `ladder[V_t]`. The ladder holds the
//! distinct follower costs between a `-∞` and a `+∞` sentinel.
//!
//! When resource `i` receives `b` followers, the bounds handed to the prefix
//! are the loosest ones compatible with the new resource, so the only
//! branching is over how many followers of each class go to `i`.

use std::collections::HashMap;
use std::time::Instant;

use num::Zero;
use thiserror::Error;

use crate::game::{Action, CostTable, FollowerClass, FollowerStructure, FollowersOutcome, Game, GameError, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DpError {
    #[error("the dynamic program needs singleton follower actions")]
    NotSingleton,
    #[error("followers do not share a single set of singleton actions")]
    NotSymmetric,
    #[error("the dynamic program needs a T-class game")]
    NotTclass,
    #[error("leader has no actions")]
    NoLeaderActions,
    #[error("deadline reached")]
    Timeout,
    #[error("no equilibrium found")]
    NoEquilibrium,
    #[error(transparent)]
    Game(#[from] GameError),
}

/// What the DP minimizes.
#[derive(Clone, Debug, PartialEq)]
pub enum OptimalityCriterion {
    /// `Σ_i ν_i · c_i(ν_i)` under the cost table the DP runs on.
    SumOfPlayerCosts,
    /// `Σ_{i ∈ resources} costs_i(ν_i + 1)`: what a pure leader on
    /// `resources` pays.
    ResourceCost { resources: Vec<usize>, costs: CostTable },
}

impl OptimalityCriterion {
    fn contribution(&self, follower_costs: &CostTable, i: usize, b: usize) -> Result<Rational, GameError> {
        match self {
            OptimalityCriterion::SumOfPlayerCosts => {
                if b == 0 {
                    Ok(Rational::zero())
                } else {
                    Ok(follower_costs.cost(i, b)? * Rational::from_integer(b.into()))
                }
            }
            OptimalityCriterion::ResourceCost { resources, costs } => {
                if resources.contains(&i) {
                    Ok(costs.cost(i, b + 1)?.clone())
                } else {
                    Ok(Rational::zero())
                }
            }
        }
    }
}

/// Table key: prefix length, per-class budgets, experienced-cost bounds and
/// deviation-cost bounds (ladder indices).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DpKey {
    pub prefix: usize,
    pub budgets: Vec<usize>,
    pub max_cost: Vec<usize>,
    pub min_deviation: Vec<usize>,
}

/// Optimal value of a key and the choice that attains it.
#[derive(Clone, Debug, PartialEq)]
pub struct DpEntry {
    /// `None` when no prefix assignment satisfies the key.
    pub value: Option<Rational>,
    /// Followers of each class placed on the last resource of the prefix,
    /// and the key of the remaining prefix.
    pub choice: Option<(Vec<usize>, DpKey)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DpSolution {
    pub value: Rational,
    /// `configs[t][i]`.
    pub configurations: Vec<Vec<usize>>,
}

/// Memoized table for one game and criterion.
pub struct NeDp {
    resources: usize,
    classes: Vec<FollowerClass>,
    costs: CostTable,
    criterion: OptimalityCriterion,
    ladder: Vec<Rational>,
    // idx[i][x] = ladder index of c_i(x); x = 0 is unused
    idx: Vec<Vec<usize>>,
    // class membership per resource
    members: Vec<Vec<bool>>,
    contributions: Vec<Vec<Rational>>,
    memo: HashMap<DpKey, DpEntry>,
    deadline: Option<Instant>,
}

impl NeDp {
    /// Cost rows must reach congestion `Σ_t n_t + 1` on every resource some
    /// class can use.
    pub fn new(
        resources: usize,
        classes: Vec<FollowerClass>,
        costs: CostTable,
        criterion: OptimalityCriterion,
    ) -> Result<Self, GameError> {
        let capacity: Vec<usize> =
            (0..resources).map(|i| classes.iter().filter(|c| c.resources.contains(&i)).map(|c| c.size).sum()).collect();
        let mut values: Vec<Rational> = Vec::new();
        for (i, &cap) in capacity.iter().enumerate() {
            for x in 1..=cap + 1 {
                if cap > 0 {
                    values.push(costs.cost(i, x)?.clone());
                }
            }
        }
        values.sort();
        values.dedup();
        // 0 is -∞, len + 1 is +∞
        let position = |v: &Rational| values.binary_search(v).expect("value is on the ladder") + 1;
        let mut idx = Vec::with_capacity(resources);
        for (i, &cap) in capacity.iter().enumerate() {
            let mut row = vec![0; cap + 2];
            if cap > 0 {
                for (x, slot) in row.iter_mut().enumerate().skip(1) {
                    *slot = position(costs.cost(i, x)?);
                }
            }
            idx.push(row);
        }
        let members = (0..resources).map(|i| classes.iter().map(|c| c.resources.contains(&i)).collect()).collect();
        let contributions = capacity
            .iter()
            .enumerate()
            .map(|(i, &cap)| (0..=cap).map(|b| criterion.contribution(&costs, i, b)).collect())
            .collect::<Result<Vec<Vec<Rational>>, GameError>>()?;
        Ok(NeDp {
            resources,
            classes,
            costs,
            criterion,
            ladder: values,
            idx,
            members,
            contributions,
            memo: HashMap::new(),
            deadline: None,
        })
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    /// Distinct finite follower costs, in increasing order.
    pub fn ladder(&self) -> &[Rational] {
        &self.ladder
    }

    /// Number of ladder positions, sentinels included.
    pub fn ladder_len(&self) -> usize {
        self.ladder.len() + 2
    }

    pub fn table_size(&self) -> usize {
        self.memo.len()
    }

    pub fn criterion(&self) -> &OptimalityCriterion {
        &self.criterion
    }

    /// The unconstrained key over all resources and followers.
    pub fn root(&self) -> DpKey {
        let t = self.classes.len();
        DpKey {
            prefix: self.resources,
            budgets: self.classes.iter().map(|c| c.size).collect(),
            max_cost: vec![self.ladder_len() - 1; t],
            min_deviation: vec![0; t],
        }
    }

    /// Value of an arbitrary key, filling the table as needed.
    pub fn value(&mut self, key: &DpKey) -> Result<Option<Rational>, DpError> {
        self.entry(key)?;
        Ok(self.memo[key].value.clone())
    }

    pub fn solve(&mut self) -> Result<DpSolution, DpError> {
        let root = self.root();
        self.entry(&root)?;
        let value = self.memo[&root].value.clone().ok_or(DpError::NoEquilibrium)?;
        let mut configurations = vec![vec![0; self.resources]; self.classes.len()];
        let mut key = root;
        while key.prefix > 0 {
            let (placed, next) = self.memo[&key].choice.clone().expect("feasible entries carry a choice");
            for (t, k) in placed.into_iter().enumerate() {
                configurations[t][key.prefix - 1] = k;
            }
            key = next;
        }
        Ok(DpSolution { value, configurations })
    }

    fn entry(&mut self, key: &DpKey) -> Result<(), DpError> {
        if self.memo.contains_key(key) {
            return Ok(());
        }
        if let Some(deadline) = self.deadline {
            if self.memo.len().is_multiple_of(1024) && Instant::now() >= deadline {
                return Err(DpError::Timeout);
            }
        }
        if key.prefix == 0 {
            let value = key.budgets.iter().all(|&b| b == 0).then(Rational::zero);
            self.memo.insert(key.clone(), DpEntry { value, choice: None });
            return Ok(());
        }

        let i = key.prefix - 1;
        let t_count = self.classes.len();
        let mut best: Option<(Rational, Vec<usize>, DpKey)> = None;
        let mut placed = vec![0; t_count];
        loop {
            if let Some(child) = self.transition(key, i, &placed) {
                self.entry(&child)?;
                if let Some(v) = &self.memo[&child].value {
                    let b: usize = placed.iter().sum();
                    let total = v + &self.contributions[i][b];
                    if best.as_ref().is_none_or(|(bv, _, _)| total < *bv) {
                        best = Some((total, placed.clone(), child));
                    }
                }
            }
            // next placement vector, restricted to classes that can use i
            let mut t = 0;
            loop {
                if t == t_count {
                    let entry = match best {
                        Some((value, placed, child)) => DpEntry { value: Some(value), choice: Some((placed, child)) },
                        None => DpEntry { value: None, choice: None },
                    };
                    self.memo.insert(key.clone(), entry);
                    return Ok(());
                }
                if self.members[i][t] && placed[t] < key.budgets[t] {
                    placed[t] += 1;
                    break;
                }
                placed[t] = 0;
                t += 1;
            }
        }
    }

    /// Child key for placing `placed[t]` followers of class `t` on resource
    /// `i`, or `None` if the placement violates the key's bounds.
    fn transition(&self, key: &DpKey, i: usize, placed: &[usize]) -> Option<DpKey> {
        let b: usize = placed.iter().sum();
        let row = &self.idx[i];
        let mut budgets = key.budgets.clone();
        let mut max_cost = key.max_cost.clone();
        let mut min_deviation = key.min_deviation.clone();
        for t in 0..self.classes.len() {
            budgets[t] -= placed[t];
            if !self.members[i][t] {
                continue;
            }
            let dev = row[b + 1];
            if dev < key.min_deviation[t] {
                return None;
            }
            // prefix followers must not gain by moving to i
            max_cost[t] = max_cost[t].min(dev);
            if placed[t] > 0 {
                let exp = row[b];
                if exp > key.max_cost[t] {
                    return None;
                }
                // followers on i must not gain by moving into the prefix
                min_deviation[t] = min_deviation[t].max(exp);
            }
        }
        Some(DpKey { prefix: i, budgets, max_cost, min_deviation })
    }

    /// Follower costs the table was built from.
    pub fn costs(&self) -> &CostTable {
        &self.costs
    }
}

/// Best NE of a T-class game with no leader mass, under `criterion`.
pub fn optimal_ne_dp(game: &Game, criterion: OptimalityCriterion) -> Result<DpSolution, DpError> {
    let classes = game.classes().ok_or(DpError::NotTclass)?.to_vec();
    NeDp::new(game.resources, classes, game.follower_costs.clone(), criterion)?.solve()
}

/// A pure leader action with the followers' best response and its cost.
#[derive(Clone, Debug, PartialEq)]
pub struct PureOse {
    pub leader_action: usize,
    pub outcome: FollowersOutcome,
    pub leader_cost: Rational,
}

fn shifted_costs(costs: &CostTable, action: &Action) -> CostTable {
    action.iter().fold(costs.clone(), |table, &i| table.shifted(i))
}

/// Pure-leader OSE of a T-class SSCG: for every leader resource, the
/// followers' NE that is cheapest for the leader.
pub fn ose_pure_leader_tclass(game: &Game) -> Result<PureOse, DpError> {
    ose_pure_leader_tclass_until(game, None)
}

pub fn ose_pure_leader_tclass_until(game: &Game, deadline: Option<Instant>) -> Result<PureOse, DpError> {
    let classes = game.classes().ok_or(DpError::NotTclass)?.to_vec();
    if !game.is_singleton() {
        return Err(DpError::NotSingleton);
    }
    best_over_leader_actions(game, &classes, deadline)?
        .map(|(k, sol)| PureOse {
            leader_action: k,
            outcome: FollowersOutcome::Configurations(sol.configurations),
            leader_cost: sol.value,
        })
        .ok_or(DpError::NoLeaderActions)
}

/// Pure-leader OSE when all followers share one set of singleton actions;
/// leader actions may span several resources.
pub fn ose_pure_leader_symmetric_scg(game: &Game) -> Result<PureOse, DpError> {
    ose_pure_leader_symmetric_scg_until(game, None)
}

pub fn ose_pure_leader_symmetric_scg_until(game: &Game, deadline: Option<Instant>) -> Result<PureOse, DpError> {
    let shared = game.symmetric_singleton_followers().ok_or_else(|| {
        let singleton = game.expanded_followers().iter().flatten().all(|a| a.len() == 1);
        if singleton {
            DpError::NotSymmetric
        } else {
            DpError::NotSingleton
        }
    })?;
    let class = FollowerClass { size: game.follower_count(), resources: shared.clone() };
    let (k, sol) = best_over_leader_actions(game, &[class], deadline)?.ok_or(DpError::NoLeaderActions)?;
    let nu = &sol.configurations[0];
    let outcome = match &game.followers {
        FollowerStructure::Classes(classes) => {
            // hand the pooled counts out class by class
            let mut remaining = nu.clone();
            let configs = classes
                .iter()
                .map(|c| {
                    let mut cfg = vec![0; game.resources];
                    let mut left = c.size;
                    for &i in &c.resources {
                        let take = remaining[i].min(left);
                        cfg[i] = take;
                        remaining[i] -= take;
                        left -= take;
                    }
                    cfg
                })
                .collect();
            FollowersOutcome::Configurations(configs)
        }
        FollowerStructure::General(followers) => {
            let mut slots: Vec<usize> = shared.iter().flat_map(|&i| std::iter::repeat_n(i, nu[i])).collect();
            slots.reverse();
            let profile = followers
                .iter()
                .map(|f| {
                    let i = slots.pop().expect("one slot per follower");
                    f.actions.iter().position(|a| a[0] == i).expect("shared action")
                })
                .collect();
            FollowersOutcome::Profile(profile)
        }
    };
    Ok(PureOse { leader_action: k, outcome, leader_cost: sol.value })
}

fn best_over_leader_actions(
    game: &Game,
    classes: &[FollowerClass],
    deadline: Option<Instant>,
) -> Result<Option<(usize, DpSolution)>, DpError> {
    let mut best: Option<(usize, DpSolution)> = None;
    for (k, action) in game.leader_actions.iter().enumerate() {
        let criterion =
            OptimalityCriterion::ResourceCost { resources: action.clone(), costs: game.leader_costs.clone() };
        let costs = shifted_costs(&game.follower_costs, action);
        let sol = NeDp::new(game.resources, classes.to_vec(), costs, criterion)?.with_deadline(deadline).solve()?;
        if best.as_ref().is_none_or(|(_, b)| sol.value < b.value) {
            best = Some((k, sol));
        }
    }
    Ok(best)
}
