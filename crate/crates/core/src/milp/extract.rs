use crate::equilibrium::{best_response_dynamics, find_deviation_tol, leader_cost};
use crate::game::{to_f64, FollowersOutcome, Game, LeaderStrategy, Rational};

use super::bnb::MilpSolution;
use super::model::{Entity, MilpModel};
use super::MilpError;

/// Tolerance for decoding checks: NE inequalities, `z = y·σ` and agreement
/// between the model objective and the re-evaluated leader cost.
pub const DECODE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ExtractedOse {
    pub strategy: LeaderStrategy,
    pub outcome: FollowersOutcome,
    /// Leader cost of the decoded pair, in exact arithmetic.
    pub leader_cost: Rational,
    /// Whether the pair is an NE without any tolerance.
    pub exact_nash: bool,
    pub max_product_residual: f64,
}

/// Reads the leader strategy and followers' outcome off a solution and
/// re-checks them against the game.
pub fn extract_ose(model: &MilpModel, solution: &MilpSolution, game: &Game) -> Result<ExtractedOse, MilpError> {
    let values = solution.values.as_ref().ok_or(MilpError::NoIncumbent)?;
    let objective = solution.objective.ok_or(MilpError::NoIncumbent)?;
    let m = game.leader_actions.len();
    let mut alpha = vec![0.0; m];
    let mut profile = vec![0; game.follower_count()];
    let mut configs = vec![vec![0; game.resources]; game.class_count()];
    for (v, &x) in model.variables.iter().zip(values) {
        match v.entity {
            Entity::AlphaAction { action } => alpha[action] = x,
            Entity::AlphaResource { resource } => {
                if let Some(k) = game.leader_actions.iter().position(|a| a == &vec![resource]) {
                    alpha[k] = x;
                }
            }
            Entity::Q { class, resource, level } if x > 0.5 => configs[class][resource] = level,
            Entity::X { follower, action } if x > 0.5 => profile[follower] = action,
            _ => {}
        }
    }
    let strategy = LeaderStrategy::from_floats(&alpha);
    let outcome = match game.classes() {
        Some(_) => FollowersOutcome::Configurations(configs),
        None => FollowersOutcome::Profile(profile),
    };
    outcome.check(game).map_err(|e| MilpError::Decode(e.to_string()))?;

    // z must equal y·σ(i)
    let sigma: Vec<f64> = strategy.marginals(game).iter().map(to_f64).collect();
    let mut y = std::collections::HashMap::new();
    for (v, &x) in model.variables.iter().zip(values) {
        if let Entity::Y { resource, level } = v.entity {
            y.insert((resource, level), x);
        }
    }
    let mut residual: f64 = 0.0;
    for (v, &x) in model.variables.iter().zip(values) {
        if let Entity::Z { resource, level } = v.entity {
            residual = residual.max((x - y[&(resource, level)] * sigma[resource]).abs());
        }
    }
    if residual > DECODE_TOL {
        return Err(MilpError::Decode(format!("z differs from y·σ by {residual:e}")));
    }

    let exact_nash = find_deviation_tol(game, &strategy, &outcome, &Rational::from_integer(0.into()))?.is_none();
    if !exact_nash {
        let tol = Rational::from_float(DECODE_TOL).expect("finite");
        if let Some(w) = find_deviation_tol(game, &strategy, &outcome, &tol)? {
            return Err(MilpError::Decode(format!("not an equilibrium: {w:?}")));
        }
    }
    let cost = leader_cost(game, &strategy, &outcome)?;
    let diff = (to_f64(&cost) - objective).abs();
    if diff > DECODE_TOL * objective.abs().max(1.0) {
        return Err(MilpError::Decode(format!("leader cost {} but objective {objective}", to_f64(&cost))));
    }
    Ok(ExtractedOse { strategy, outcome, leader_cost: cost, exact_nash, max_product_residual: residual })
}

/// Variable values representing `(strategy, outcome)` in `model`.
pub fn encode_solution(
    model: &MilpModel,
    game: &Game,
    strategy: &LeaderStrategy,
    outcome: &FollowersOutcome,
) -> Result<Vec<f64>, MilpError> {
    strategy.check(game)?;
    outcome.check(game)?;
    let nu = outcome.congestion(game);
    let sigma: Vec<f64> = strategy.marginals(game).iter().map(to_f64).collect();
    let configs = match outcome.to_configurations(game) {
        Some(FollowersOutcome::Configurations(c)) => c,
        _ => Vec::new(),
    };
    let profile = match outcome.to_profile(game) {
        Some(FollowersOutcome::Profile(p)) => p,
        _ => Vec::new(),
    };
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    let values = model
        .variables
        .iter()
        .map(|v| match v.entity {
            Entity::Q { class, resource, level } => flag(configs[class][resource] == level),
            Entity::Y { resource, level } => flag(nu[resource] == level),
            Entity::Z { resource, level } => flag(nu[resource] == level) * sigma[resource],
            Entity::AlphaResource { resource } => sigma[resource],
            Entity::AlphaAction { action } => to_f64(&strategy.probs[action]),
            Entity::X { follower, action } => flag(profile[follower] == action),
        })
        .collect();
    Ok(values)
}

/// A feasible starting point: for every pure leader action, best-response
/// dynamics from everyone's first action; the cheapest result for the leader
/// is encoded.
pub fn heuristic_incumbent(model: &MilpModel, game: &Game) -> Result<Vec<f64>, MilpError> {
    let m = game.leader_actions.len();
    let start = FollowersOutcome::Profile(vec![0; game.follower_count()]);
    let start = start.to_configurations(game).unwrap_or(start);
    let mut best: Option<(Rational, LeaderStrategy, FollowersOutcome)> = None;
    for a in 0..m {
        let strategy = LeaderStrategy::pure(a, m);
        let Ok(run) = best_response_dynamics(game, &strategy, &start, None) else { continue };
        let cost = leader_cost(game, &strategy, &run.outcome)?;
        if best.as_ref().is_none_or(|(b, _, _)| cost < *b) {
            best = Some((cost, strategy, run.outcome));
        }
    }
    let (_, strategy, outcome) = best.ok_or(MilpError::NoIncumbent)?;
    encode_solution(model, game, &strategy, &outcome)
}
