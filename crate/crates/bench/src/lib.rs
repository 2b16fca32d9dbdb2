//! Benchmark fixtures shared by the criterion targets.

use scg_core::generators::{gen_random_scg, gen_random_tclass, ScgParams, TclassParams};
use scg_core::Game;

pub fn tclass(resources: usize, class_sizes: &[usize], seed: u64) -> Game {
    let params = TclassParams { resources, class_sizes: class_sizes.to_vec(), monotone: false, cost_max: None };
    gen_random_tclass(&params, seed).expect("valid parameters")
}

pub fn general(resources: usize, players: usize, action_size: usize, seed: u64) -> Game {
    let params =
        ScgParams { resources, players, action_size, actions_per_player: None, monotone: false, cost_max: None };
    gen_random_scg(&params, seed).expect("valid parameters")
}
