//! Brute-force OSE computation for small games.
//!
//! The pure-leader oracle tries every leader action against every followers'
//! outcome. The mixed-leader oracle fixes an outcome and solves a small LP
//! over the leader's distribution: with congestions fixed, both the leader's
//! cost and the followers' NE inequalities are linear in the distribution.

use std::collections::HashSet;

use num::Zero;
use thiserror::Error;

use crate::equilibrium::{
    deviation_in, enumerate_outcomes_up_to_symmetry, find_deviation_tol, leader_cost, leader_cost_for_congestion,
    EnumerationError, ExpectedCostView,
};
use crate::game::{to_f64, FollowerStructure, FollowersOutcome, Game, GameError, LeaderStrategy, Rational};
use crate::lp::{solve_lp, LpError, LpProblem, LpStatus, Relation};

/// Tolerance on NE inequalities when an LP solution has no exact rational
/// reading.
pub const ORACLE_NE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error(transparent)]
    Enumeration(#[from] EnumerationError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("no equilibrium found")]
    NoEquilibrium,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OseResult {
    pub strategy: LeaderStrategy,
    pub outcome: FollowersOutcome,
    pub leader_cost: Rational,
    /// Outcomes that were an NE (pure oracle) or had a feasible LP (mixed).
    pub equilibria_examined: usize,
    /// Whether the returned pair was verified as an NE in exact arithmetic
    /// (otherwise within [`ORACLE_NE_TOL`]).
    pub exact: bool,
}

/// Best pure leader action together with the followers' NE that is
/// cheapest for the leader.
pub fn ose_oracle_pure_leader(game: &Game, cap: u128) -> Result<OseResult, OracleError> {
    game.validate().into_result()?;
    let m = game.leader_actions.len();
    let mut best: Option<(Rational, usize, FollowersOutcome)> = None;
    let mut examined = 0;
    let zero = Rational::zero();
    for k in 0..m {
        let strategy = LeaderStrategy::pure(k, m);
        let view = ExpectedCostView::for_strategy(game, &strategy);
        for outcome in enumerate_outcomes_up_to_symmetry(game, cap)? {
            let nu = outcome.congestion(game);
            let cost = leader_cost_for_congestion(game, &strategy, &nu)?;
            if best.as_ref().is_some_and(|(b, _, _)| cost >= *b) {
                // cannot improve; still count equilibria for the report
                if deviation_in(game, &view, &outcome, &nu, &zero)?.is_none() {
                    examined += 1;
                }
                continue;
            }
            if deviation_in(game, &view, &outcome, &nu, &zero)?.is_none() {
                examined += 1;
                best = Some((cost, k, outcome));
            }
        }
    }
    let (leader_cost, k, outcome) = best.ok_or(OracleError::NoEquilibrium)?;
    Ok(OseResult {
        strategy: LeaderStrategy::pure(k, m),
        outcome,
        leader_cost,
        equilibria_examined: examined,
        exact: true,
    })
}

/// Float copies of the cost tables.
struct Tables {
    follower: Vec<Vec<f64>>,
    leader: Vec<Vec<f64>>,
}

impl Tables {
    fn new(game: &Game) -> Self {
        let convert = |table: &crate::game::CostTable| {
            (0..game.resources)
                .map(|i| (0..=table.max_congestion(i)).map(|x| to_f64(table.cost(i, x).expect("in range"))).collect())
                .collect()
        };
        Tables { follower: convert(&game.follower_costs), leader: convert(&game.leader_costs) }
    }
}

/// Minimum leader cost over all mixed commitments and all followers' NEs.
pub fn ose_oracle_mixed_leader(game: &Game, cap: u128) -> Result<OseResult, OracleError> {
    game.validate().into_result()?;
    let tables = Tables::new(game);
    let m = game.leader_actions.len();
    let mut best: Option<(f64, Vec<f64>, FollowersOutcome)> = None;
    let mut examined = 0;

    for outcome in enumerate_outcomes_up_to_symmetry(game, cap)? {
        let nu = outcome.congestion(game);
        let pure_costs: Vec<f64> =
            game.leader_actions.iter().map(|a| a.iter().map(|&i| tables.leader[i][nu[i] + 1]).sum()).collect();
        let lower = pure_costs.iter().copied().fold(f64::INFINITY, f64::min);
        if best.as_ref().is_some_and(|(b, _, _)| lower >= b - 1e-12) {
            continue;
        }
        let lp = outcome_lp(game, &tables, &outcome, &nu, &pure_costs);
        let sol = solve_lp(&lp)?;
        if sol.status != LpStatus::Optimal {
            continue;
        }
        examined += 1;
        if best.as_ref().is_none_or(|(b, _, _)| sol.objective < b - 1e-12) {
            best = Some((sol.objective, sol.x, outcome));
        }
    }
    let (_, alpha, outcome) = best.ok_or(OracleError::NoEquilibrium)?;
    debug_assert_eq!(alpha.len(), m);
    let strategy = LeaderStrategy::from_floats(&alpha);
    let exact = find_deviation_tol(game, &strategy, &outcome, &Rational::zero())?.is_none();
    if !exact {
        let tol = Rational::from_float(ORACLE_NE_TOL).expect("finite");
        if find_deviation_tol(game, &strategy, &outcome, &tol)?.is_some() {
            return Err(OracleError::NoEquilibrium);
        }
    }
    let leader_cost = leader_cost(game, &strategy, &outcome)?;
    Ok(OseResult { strategy, outcome, leader_cost, equilibria_examined: examined, exact })
}

/// LP over the leader's distribution `α` for a fixed outcome: minimize the
/// leader's cost subject to the followers' NE inequalities.
fn outcome_lp(game: &Game, tables: &Tables, outcome: &FollowersOutcome, nu: &[usize], pure_costs: &[f64]) -> LpProblem {
    let m = game.leader_actions.len();
    let mut lp = LpProblem::new(m);
    lp.objective = pure_costs.to_vec();
    for u in &mut lp.upper {
        *u = 1.0;
    }
    lp.add((0..m).map(|k| (k, 1.0)).collect(), Relation::Eq, 1.0);

    let c = &tables.follower;
    // c^σ_i(x) = c_i(x) + σ(i)·(c_i(x+1) − c_i(x)) with σ(i) = Σ_{k: i ∈ a_k} α_k
    let add_ne = |stay: &[usize], go: &[usize], lp: &mut LpProblem| {
        let mut coeffs = vec![0.0; m];
        let mut rhs = 0.0;
        for &i in stay {
            rhs -= c[i][nu[i]];
            let slope = c[i][nu[i] + 1] - c[i][nu[i]];
            for (k, a) in game.leader_actions.iter().enumerate() {
                if a.contains(&i) {
                    coeffs[k] += slope;
                }
            }
        }
        for &j in go {
            rhs += c[j][nu[j] + 1];
            let slope = c[j][nu[j] + 2] - c[j][nu[j] + 1];
            for (k, a) in game.leader_actions.iter().enumerate() {
                if a.contains(&j) {
                    coeffs[k] -= slope;
                }
            }
        }
        let sparse: Vec<(usize, f64)> = coeffs.into_iter().enumerate().filter(|&(_, v)| v != 0.0).collect();
        lp.add(sparse, Relation::Le, rhs);
    };

    let mut seen: HashSet<(Vec<usize>, Vec<usize>)> = HashSet::new();
    match (outcome, &game.followers) {
        (FollowersOutcome::Configurations(configs), FollowerStructure::Classes(classes)) => {
            for (cfg, class) in configs.iter().zip(classes) {
                for &i in class.resources.iter().filter(|&&i| cfg[i] > 0) {
                    for &j in class.resources.iter().filter(|&&j| j != i) {
                        if seen.insert((vec![i], vec![j])) {
                            add_ne(&[i], &[j], &mut lp);
                        }
                    }
                }
            }
        }
        (FollowersOutcome::Profile(profile), _) => {
            let actions = game.expanded_followers();
            for (list, &a) in actions.iter().zip(profile) {
                let current = &list[a];
                for (k, alt) in list.iter().enumerate() {
                    if k == a {
                        continue;
                    }
                    let stay: Vec<usize> = current.iter().copied().filter(|i| !alt.contains(i)).collect();
                    let go: Vec<usize> = alt.iter().copied().filter(|i| !current.contains(i)).collect();
                    if seen.insert((stay.clone(), go.clone())) {
                        add_ne(&stay, &go, &mut lp);
                    }
                }
            }
        }
        (FollowersOutcome::Configurations(_), FollowerStructure::General(_)) => {
            unreachable!("enumeration yields profiles for general games")
        }
    }
    lp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::DEFAULT_ENUMERATION_CAP;
    use crate::game::{int, CostTable, FollowerClass};

    fn one_follower_game() -> Game {
        Game {
            resources: 2,
            leader_actions: vec![vec![0], vec![1]],
            followers: FollowerStructure::Classes(vec![FollowerClass { size: 1, resources: vec![0, 1] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![1, 5, 6, 7], vec![2, 6, 7, 8]]),
            leader_costs: CostTable::from_integer_rows(&[vec![1, 5, 6, 7], vec![2, 6, 7, 8]]),
            metadata: None,
        }
    }

    #[test]
    fn pure_oracle_on_one_follower_game() {
        let r = ose_oracle_pure_leader(&one_follower_game(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.strategy, LeaderStrategy::pure(0, 2));
        assert_eq!(r.leader_cost, int(1));
        assert_eq!(r.outcome, FollowersOutcome::Configurations(vec![vec![0, 1]]));
    }

    #[test]
    fn mixed_oracle_never_beats_by_accident() {
        let g = one_follower_game();
        let pure = ose_oracle_pure_leader(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        let mixed = ose_oracle_mixed_leader(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(mixed.leader_cost <= pure.leader_cost);
        assert!(mixed.exact);
        // leader pays at least 1 on any resource
        assert_eq!(mixed.leader_cost, int(1));
    }

    #[test]
    fn constant_costs_give_constant_value() {
        let g = Game {
            resources: 2,
            leader_actions: vec![vec![0], vec![1]],
            followers: FollowerStructure::Classes(vec![FollowerClass { size: 1, resources: vec![0] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![3, 3, 3, 3], vec![3, 3, 3]]),
            leader_costs: CostTable::from_integer_rows(&[vec![4, 4, 4, 4], vec![4, 4, 4]]),
            metadata: None,
        };
        let r = ose_oracle_mixed_leader(&g, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(r.leader_cost, int(4));
    }
}
