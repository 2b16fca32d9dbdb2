use crate::game::{Action, FollowerStructure, Game, ValidationReport, Violation, ViolationKind};

pub(crate) fn validate(game: &Game) -> ValidationReport {
    let mut out = Vec::new();
    let mut push = |location: String, kind: ViolationKind| out.push(Violation { location, kind });

    let check_action =
        |location: String, action: &Action, singleton: bool, push: &mut dyn FnMut(String, ViolationKind)| {
            if action.is_empty() {
                push(location.clone(), ViolationKind::EmptyAction);
            }
            if action.windows(2).any(|w| w[0] >= w[1]) {
                push(location.clone(), ViolationKind::UnsortedAction);
            }
            for &i in action {
                if i >= game.resources {
                    push(location.clone(), ViolationKind::ResourceOutOfRange(i));
                }
            }
            if singleton && action.len() != 1 {
                push(location, ViolationKind::SingletonRequired);
            }
        };

    let singleton_game = matches!(game.followers, FollowerStructure::Classes(_));

    if game.leader_actions.is_empty() {
        push("leader".into(), ViolationKind::NoLeaderActions);
    }
    for (k, a) in game.leader_actions.iter().enumerate() {
        check_action(format!("leader action {k}"), a, singleton_game, &mut push);
    }
    if has_duplicates(&game.leader_actions) {
        push("leader".into(), ViolationKind::DuplicateAction);
    }

    match &game.followers {
        FollowerStructure::General(followers) => {
            for (p, f) in followers.iter().enumerate() {
                if f.actions.is_empty() {
                    push(format!("follower {p}"), ViolationKind::NoActions);
                }
                for (k, a) in f.actions.iter().enumerate() {
                    check_action(format!("follower {p} action {k}"), a, false, &mut push);
                }
                if has_duplicates(&f.actions) {
                    push(format!("follower {p}"), ViolationKind::DuplicateAction);
                }
            }
        }
        FollowerStructure::Classes(classes) => {
            for (t, c) in classes.iter().enumerate() {
                if c.size == 0 {
                    push(format!("class {t}"), ViolationKind::EmptyClass);
                }
                if c.resources.is_empty() {
                    push(format!("class {t}"), ViolationKind::NoActions);
                }
                check_action(format!("class {t} resources"), &c.resources, false, &mut push);
            }
        }
    }

    for (name, table) in [("follower_costs", &game.follower_costs), ("leader_costs", &game.leader_costs)] {
        if table.resources() != game.resources {
            push(name.into(), ViolationKind::CostTableResources { expected: game.resources, found: table.resources() });
            continue;
        }
        for i in 0..game.resources {
            let required = game.required_cost_len(i);
            let found = table.max_congestion(i);
            if found < required {
                push(format!("{name} resource {i}"), ViolationKind::CostTableTooShort { required, found });
            }
        }
    }

    ValidationReport { violations: out }
}

fn has_duplicates(actions: &[Action]) -> bool {
    let mut sorted: Vec<&Action> = actions.iter().collect();
    sorted.sort();
    sorted.windows(2).any(|w| w[0] == w[1])
}

#[cfg(test)]
mod tests {
    use crate::game::*;

    fn two_resource_sscg() -> Game {
        Game {
            resources: 2,
            leader_actions: vec![vec![0], vec![1]],
            followers: FollowerStructure::Classes(vec![FollowerClass { size: 2, resources: vec![0, 1] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![1, 3, 4, 5, 6], vec![2, 5, 6, 7, 8]]),
            leader_costs: CostTable::from_integer_rows(&[vec![1, 3, 4, 5, 6], vec![2, 5, 6, 7, 8]]),
            metadata: None,
        }
    }

    #[test]
    fn valid_symmetric_sscg_has_empty_report() {
        assert!(two_resource_sscg().validate().is_valid());
    }

    #[test]
    fn non_singleton_action_in_sscg_is_flagged() {
        let mut g = two_resource_sscg();
        g.leader_actions.push(vec![0, 1]);
        let report = g.validate();
        assert!(report.has(|k| *k == ViolationKind::SingletonRequired));
        assert!(report.violations.iter().any(|v| v.to_string().contains("singleton required")));
    }

    #[test]
    fn short_cost_row_is_flagged() {
        let mut g = two_resource_sscg();
        // congestion cap 3 on each resource, so 5 entries are needed
        g.follower_costs = CostTable::from_integer_rows(&[vec![1, 3, 4, 5], vec![2, 5, 6, 7, 8]]);
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].to_string().contains("cost table too short"));
    }

    #[test]
    fn each_mutation_is_reported() {
        let mut g = two_resource_sscg();
        g.followers = FollowerStructure::Classes(vec![FollowerClass { size: 0, resources: vec![1, 0, 5] }]);
        let report = g.validate();
        assert!(report.has(|k| *k == ViolationKind::EmptyClass));
        assert!(report.has(|k| *k == ViolationKind::UnsortedAction));
        assert!(report.has(|k| *k == ViolationKind::ResourceOutOfRange(5)));

        let mut g = two_resource_sscg();
        g.leader_actions = vec![];
        assert!(g.validate().has(|k| *k == ViolationKind::NoLeaderActions));

        let mut g = two_resource_sscg();
        g.leader_costs = CostTable::from_integer_rows(&[vec![1, 2, 3, 4, 5]]);
        assert!(g.validate().has(|k| matches!(k, ViolationKind::CostTableResources { .. })));

        let mut g = two_resource_sscg();
        g.followers = FollowerStructure::General(vec![Follower { actions: vec![vec![0], vec![], vec![0]] }]);
        let report = g.validate();
        assert!(report.has(|k| *k == ViolationKind::EmptyAction));
        assert!(report.has(|k| *k == ViolationKind::DuplicateAction));
    }
}
