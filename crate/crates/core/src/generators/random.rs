use rand::seq::index;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::{stream, GeneratorError, RNG_NAME, STREAM_FOLLOWER_COSTS, STREAM_LEADER_COSTS, STREAM_STRUCTURE};
use crate::game::{Action, CostTable, Follower, FollowerClass, FollowerStructure, Game};

/// Random T-class singleton game.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TclassParams {
    pub resources: usize,
    /// `n_t` for each class.
    pub class_sizes: Vec<usize>,
    /// Sort each cost row ascending.
    pub monotone: bool,
    /// Costs are drawn from `1..=cost_max`; defaults to `n·r·T`.
    pub cost_max: Option<u64>,
}

/// Random general game where every player gets distinct actions of one
/// cardinality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScgParams {
    pub resources: usize,
    /// Players including the leader.
    pub players: usize,
    pub action_size: usize,
    /// Defaults to `⌊r/2⌋` (at least one).
    pub actions_per_player: Option<usize>,
    pub monotone: bool,
    /// Costs are drawn from `1..=cost_max`; defaults to `n·r`.
    pub cost_max: Option<u64>,
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Action {
    let mut picked = index::sample(rng, n, k).into_vec();
    picked.sort_unstable();
    picked
}

fn random_table(rng: &mut ChaCha8Rng, resources: usize, len: usize, cost_max: u64, monotone: bool) -> CostTable {
    let rows: Vec<Vec<i64>> = (0..resources)
        .map(|_| {
            let mut row: Vec<i64> = (0..len).map(|_| rng.random_range(1..=cost_max) as i64).collect();
            if monotone {
                row.sort_unstable();
            }
            row
        })
        .collect();
    CostTable::from_integer_rows(&rows)
}

pub fn gen_random_tclass(params: &TclassParams, seed: u64) -> Result<Game, GeneratorError> {
    let r = params.resources;
    if r == 0 || params.class_sizes.is_empty() || params.class_sizes.contains(&0) {
        return Err(GeneratorError::InvalidParameters("need at least one resource and one non-empty class".into()));
    }
    let n = params.class_sizes.iter().sum::<usize>() + 1;
    let t = params.class_sizes.len();
    let cost_max = params.cost_max.unwrap_or((n * r * t) as u64);
    if cost_max == 0 {
        return Err(GeneratorError::InvalidParameters("cost_max must be positive".into()));
    }
    let half = (r / 2).max(1);

    let mut rng = stream(seed, STREAM_STRUCTURE);
    let classes: Vec<FollowerClass> = params
        .class_sizes
        .iter()
        .map(|&size| FollowerClass { size, resources: random_subset(&mut rng, r, half) })
        .collect();
    let leader_actions = random_subset(&mut rng, r, half).into_iter().map(|i| vec![i]).collect();

    let len = n + 2;
    let follower_costs = random_table(&mut stream(seed, STREAM_FOLLOWER_COSTS), r, len, cost_max, params.monotone);
    let leader_costs = random_table(&mut stream(seed, STREAM_LEADER_COSTS), r, len, cost_max, params.monotone);
    Ok(Game {
        resources: r,
        leader_actions,
        followers: FollowerStructure::Classes(classes),
        follower_costs,
        leader_costs,
        metadata: Some(json!({
            "generator": "tclass",
            "rng": RNG_NAME,
            "seed": seed,
            "parameters": {
                "r": r,
                "class_sizes": params.class_sizes,
                "monotone": params.monotone,
                "cost_max": cost_max,
                "leader_actions": "uniform subset of size r/2",
            },
        })),
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

pub fn gen_random_scg(params: &ScgParams, seed: u64) -> Result<Game, GeneratorError> {
    let r = params.resources;
    let s = params.action_size;
    if params.players < 2 {
        return Err(GeneratorError::InvalidParameters("need a leader and at least one follower".into()));
    }
    if s == 0 || s > r {
        return Err(GeneratorError::InvalidParameters(format!("action size {s} with {r} resources")));
    }
    let per_player = params.actions_per_player.unwrap_or((r / 2).max(1));
    if per_player == 0 || binomial(r, s) < per_player as u128 {
        return Err(GeneratorError::InvalidParameters(format!(
            "cannot draw {per_player} distinct actions of size {s} from {r} resources"
        )));
    }
    let n = params.players;
    let cost_max = params.cost_max.unwrap_or((n * r) as u64);
    if cost_max == 0 {
        return Err(GeneratorError::InvalidParameters("cost_max must be positive".into()));
    }

    let mut rng = stream(seed, STREAM_STRUCTURE);
    let draw_actions = |rng: &mut ChaCha8Rng| {
        let mut actions: Vec<Action> = Vec::with_capacity(per_player);
        while actions.len() < per_player {
            let a = random_subset(rng, r, s);
            if !actions.contains(&a) {
                actions.push(a);
            }
        }
        actions
    };
    let leader_actions = draw_actions(&mut rng);
    let followers = (1..n).map(|_| Follower { actions: draw_actions(&mut rng) }).collect();

    let len = n + 2;
    let follower_costs = random_table(&mut stream(seed, STREAM_FOLLOWER_COSTS), r, len, cost_max, params.monotone);
    let leader_costs = random_table(&mut stream(seed, STREAM_LEADER_COSTS), r, len, cost_max, params.monotone);
    Ok(Game {
        resources: r,
        leader_actions,
        followers: FollowerStructure::General(followers),
        follower_costs,
        leader_costs,
        metadata: Some(json!({
            "generator": "scg",
            "rng": RNG_NAME,
            "seed": seed,
            "parameters": {
                "r": r,
                "n": n,
                "action_size": s,
                "actions_per_player": per_player,
                "monotone": params.monotone,
                "cost_max": cost_max,
            },
        })),
    })
}
