use proptest::prelude::*;
use scg_core::equilibrium::{best_response_dynamics, expected_follower_cost, is_nash, rosenthal_potential};
use scg_core::generators::{gen_random_scg, gen_random_tclass, ScgParams, TclassParams};
use scg_core::{load_game, save_game, FollowersOutcome, Game, LeaderStrategy, Rational};

fn random_game(seed: u64, general: bool) -> Game {
    if general {
        let params = ScgParams {
            resources: 2 + (seed % 5) as usize,
            players: 2 + (seed % 5) as usize,
            action_size: 1 + (seed % 2) as usize,
            actions_per_player: None,
            monotone: seed.is_multiple_of(2),
            cost_max: Some(25),
        };
        gen_random_scg(&params, seed).unwrap()
    } else {
        let sizes = vec![1 + (seed % 3) as usize; 1 + (seed % 2) as usize];
        let params = TclassParams {
            resources: 2 + (seed % 5) as usize,
            class_sizes: sizes,
            monotone: seed.is_multiple_of(3),
            cost_max: Some(25),
        };
        gen_random_tclass(&params, seed).unwrap()
    }
}

fn crowded_start(game: &Game) -> FollowersOutcome {
    match game.classes() {
        Some(classes) => FollowersOutcome::Configurations(
            classes
                .iter()
                .map(|c| {
                    let mut cfg = vec![0; game.resources];
                    cfg[c.resources[0]] = c.size;
                    cfg
                })
                .collect(),
        ),
        None => FollowersOutcome::Profile(vec![0; game.follower_count()]),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn json_round_trip(seed in 0u64..10_000, general in any::<bool>()) {
        let game = random_game(seed, general);
        let text = save_game(&game);
        prop_assert_eq!(load_game(&text).unwrap(), game);
    }

    #[test]
    fn expected_cost_between_endpoints(seed in 0u64..10_000, num in 0i64..=16) {
        let game = random_game(seed, false);
        let p = Rational::new(num.into(), 16.into());
        for i in 0..game.resources {
            for x in 0..game.follower_costs.max_congestion(i) {
                let e = expected_follower_cost(&game.follower_costs, &p, i, x).unwrap();
                let a = game.follower_costs.cost(i, x).unwrap();
                let b = game.follower_costs.cost(i, x + 1).unwrap();
                prop_assert!(e >= *a.min(b) && e <= *a.max(b));
            }
        }
    }

    #[test]
    fn brd_lowers_potential_to_an_equilibrium(seed in 0u64..10_000, general in any::<bool>(), pick in 0usize..8) {
        let game = random_game(seed, general);
        let m = game.leader_actions.len();
        let sigma = if pick == 7 { LeaderStrategy::uniform(m) } else { LeaderStrategy::pure(pick % m, m) };
        let start = crowded_start(&game);
        let run = best_response_dynamics(&game, &sigma, &start, None).unwrap();
        prop_assert!(is_nash(&game, &sigma, &run.outcome).unwrap());
        prop_assert_eq!(run.potentials.len(), run.steps + 1);
        prop_assert!(run.potentials.windows(2).all(|w| w[1] < w[0]));
        prop_assert_eq!(run.potentials.last().unwrap(), &rosenthal_potential(&game, &sigma, &run.outcome).unwrap());
    }

    #[test]
    fn from_floats_is_a_distribution(values in prop::collection::vec(0.0f64..1.0, 1..6)) {
        prop_assume!(values.iter().sum::<f64>() > 1e-6);
        let s = LeaderStrategy::from_floats(&values);
        prop_assert_eq!(s.probs.iter().sum::<Rational>(), Rational::from_integer(1.into()));
        prop_assert!(s.probs.iter().all(|p| *p >= Rational::from_integer(0.into())));
    }
}
