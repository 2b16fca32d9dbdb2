//! Both formulations describe congestion on resource `i` by binaries
//! `y_{iv}` (exactly `v` followers on `i`, none set means zero) and the
//! leader's probability on `i` by `σ(i)`; `z_{iv}` linearizes `y_{iv}·σ(i)`.
//! With `ν_i` the congestion, the leader's cost and the followers' expected
//! costs are linear in `y`, `z` and `σ`:
//!
//! * `Σ_i c_{i,ℓ}(ν_i+1)·σ(i) = Σ_i [c_{i,ℓ}(1)·σ(i) + Σ_v (c_{i,ℓ}(v+1) − c_{i,ℓ}(1))·z_{iv}]`
//! * `c^σ_i(ν_i) = Σ_v [c_i(v)·y_{iv} + (c_i(v+1) − c_i(v))·z_{iv}]` when `ν_i ≥ 1`
//! * `c^σ_j(ν_j+1) = c_j(1) + (c_j(2) − c_j(1))·σ(j) + Σ_v [(c_j(v+1) − c_j(1))·y_{jv}
//!   + (c_j(v+2) − c_j(v+1) − c_j(2) + c_j(1))·z_{jv}]`
//!
//! The `ν = 0` terms are what the leader pays, or a deviating follower
//! meets, on an empty resource.

use crate::game::{to_f64, CostTable, Game, GameKind};
use crate::lp::Relation;

use super::model::{Entity, MilpModel, VarKind};
use super::MilpError;

fn cost(table: &CostTable, i: usize, x: usize) -> Result<f64, MilpError> {
    Ok(to_f64(table.cost(i, x)?))
}

/// `σ(i)` as terms over leader variables.
type Sigma = Vec<Vec<(usize, f64)>>;

struct Levels {
    // y[i][v - 1], z[i][v - 1]
    y: Vec<Vec<usize>>,
    z: Vec<Vec<usize>>,
}

fn add_levels(model: &mut MilpModel, vmax: &[usize], sigma: &Sigma) -> Levels {
    let mut y = Vec::<Vec<usize>>::with_capacity(vmax.len());
    let mut z = Vec::with_capacity(vmax.len());
    for (i, &top) in vmax.iter().enumerate() {
        y.push(
            (1..=top)
                .map(|v| {
                    model.add_var(
                        format!("y_i{i}_v{v}"),
                        VarKind::Binary,
                        0.0,
                        1.0,
                        Entity::Y { resource: i, level: v },
                    )
                })
                .collect(),
        );
        z.push(
            (1..=top)
                .map(|v| {
                    model.add_var(
                        format!("z_i{i}_v{v}"),
                        VarKind::Continuous,
                        0.0,
                        1.0,
                        Entity::Z { resource: i, level: v },
                    )
                })
                .collect::<Vec<_>>(),
        );
    }
    for (i, ys) in y.iter().enumerate() {
        if ys.len() > 1 {
            model.add_row(format!("one_level_i{i}"), ys.iter().map(|&k| (k, 1.0)).collect(), Relation::Le, 1.0);
        }
    }
    // McCormick envelope of z = y·σ
    for i in 0..vmax.len() {
        for (v, (&yk, &zk)) in y[i].iter().zip(&z[i]).enumerate() {
            let v = v + 1;
            let mut row = vec![(zk, 1.0)];
            row.extend(sigma[i].iter().map(|&(k, a)| (k, -a)));
            model.add_row(format!("mc_sigma_i{i}_v{v}"), row, Relation::Le, 0.0);
            model.add_row(format!("mc_y_i{i}_v{v}"), vec![(zk, 1.0), (yk, -1.0)], Relation::Le, 0.0);
            let mut row = vec![(zk, 1.0), (yk, -1.0)];
            row.extend(sigma[i].iter().map(|&(k, a)| (k, -a)));
            model.add_row(format!("mc_low_i{i}_v{v}"), row, Relation::Ge, -1.0);
        }
        // at most one level is active, so the envelope also holds summed over v
        if y[i].len() > 1 {
            let mut row: Vec<(usize, f64)> = z[i].iter().map(|&k| (k, 1.0)).collect();
            row.extend(sigma[i].iter().map(|&(k, a)| (k, -a)));
            model.add_row(format!("mc_sum_i{i}"), row.clone(), Relation::Le, 0.0);
            row.extend(y[i].iter().map(|&k| (k, -1.0)));
            model.add_row(format!("mc_sum_low_i{i}"), row, Relation::Ge, -1.0);
        }
    }
    Levels { y, z }
}

fn add_objective(model: &mut MilpModel, game: &Game, levels: &Levels, sigma: &Sigma) -> Result<(), MilpError> {
    let mut terms = Vec::new();
    for i in 0..game.resources {
        if sigma[i].is_empty() {
            continue;
        }
        let c1 = cost(&game.leader_costs, i, 1)?;
        terms.extend(sigma[i].iter().map(|&(k, a)| (k, a * c1)));
        for (v, &zk) in levels.z[i].iter().enumerate() {
            terms.push((zk, cost(&game.leader_costs, i, v + 2)? - c1));
        }
    }
    terms.sort_by_key(|&(k, _)| k);
    let mut merged: Vec<(usize, f64)> = Vec::new();
    for (k, a) in terms {
        match merged.last_mut() {
            Some((lk, la)) if *lk == k => *la += a,
            _ => merged.push((k, a)),
        }
    }
    merged.retain(|&(_, a)| a != 0.0);
    model.objective = merged;
    Ok(())
}

/// Terms and constant of `c^σ_i(ν_i)`, valid when `ν_i ≥ 1`.
fn stay_cost(costs: &CostTable, levels: &Levels, i: usize) -> Result<Vec<(usize, f64)>, MilpError> {
    let mut terms = Vec::new();
    for (v, (&yk, &zk)) in levels.y[i].iter().zip(&levels.z[i]).enumerate() {
        let v = v + 1;
        let (a, b) = (cost(costs, i, v)?, cost(costs, i, v + 1)?);
        terms.push((yk, a));
        terms.push((zk, b - a));
    }
    Ok(terms)
}

/// Terms and constant of `c^σ_j(ν_j + 1)`.
fn move_cost(
    costs: &CostTable,
    levels: &Levels,
    sigma: &Sigma,
    j: usize,
) -> Result<(Vec<(usize, f64)>, f64), MilpError> {
    let (c1, c2) = (cost(costs, j, 1)?, cost(costs, j, 2)?);
    let mut terms: Vec<(usize, f64)> = sigma[j].iter().map(|&(k, a)| (k, a * (c2 - c1))).collect();
    for (v, (&yk, &zk)) in levels.y[j].iter().zip(&levels.z[j]).enumerate() {
        let v = v + 1;
        let (a, b) = (cost(costs, j, v + 1)?, cost(costs, j, v + 2)?);
        terms.push((yk, a - c1));
        terms.push((zk, b - a - c2 + c1));
    }
    Ok((terms, c1))
}

/// Range of follower costs over the levels the model can reach.
fn cost_range(game: &Game, vmax: &[usize]) -> Result<Vec<(f64, f64)>, MilpError> {
    (0..game.resources)
        .map(|i| {
            let top = (vmax[i] + 2).min(game.follower_costs.max_congestion(i));
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for x in 1..=top {
                let c = cost(&game.follower_costs, i, x)?;
                lo = lo.min(c);
                hi = hi.max(c);
            }
            Ok(if top == 0 { (0.0, 0.0) } else { (lo, hi) })
        })
        .collect()
}

/// Formulation for T-class singleton games: binaries `q_{tiv}` fix how many
/// followers of class `t` use resource `i`, and `α_i` is the leader's
/// probability on `i`.
pub fn build_milp_tclass(game: &Game) -> Result<MilpModel, MilpError> {
    let classes = game.classes().ok_or(MilpError::WrongKind("T-class"))?;
    game.validate().into_result()?;
    let r = game.resources;
    let vmax: Vec<usize> = (0..r).map(|i| game.follower_capacity(i)).collect();
    let range = cost_range(game, &vmax)?;
    let hi = range.iter().map(|p| p.1).fold(0.0, f64::max);
    let lo = range.iter().map(|p| p.0).fold(0.0, f64::min);
    let mut model = MilpModel::new(GameKind::TclassSscg, 1.0 + hi - lo);

    let mut q: Vec<Vec<Vec<usize>>> = Vec::with_capacity(classes.len());
    for (t, class) in classes.iter().enumerate() {
        let mut per_resource = vec![Vec::new(); r];
        for &i in &class.resources {
            per_resource[i] = (1..=class.size)
                .map(|v| {
                    model.add_var(
                        format!("q_t{t}_i{i}_v{v}"),
                        VarKind::Binary,
                        0.0,
                        1.0,
                        Entity::Q { class: t, resource: i, level: v },
                    )
                })
                .collect();
        }
        q.push(per_resource);
    }
    let alpha: Vec<usize> = (0..r)
        .map(|i| {
            let upper = if game.leader_can_use(i) { 1.0 } else { 0.0 };
            model.add_var(format!("a{i}"), VarKind::Continuous, 0.0, upper, Entity::AlphaResource { resource: i })
        })
        .collect();
    let sigma: Sigma = alpha.iter().map(|&k| vec![(k, 1.0)]).collect();
    let levels = add_levels(&mut model, &vmax, &sigma);

    for (t, class) in classes.iter().enumerate() {
        for &i in &class.resources {
            if q[t][i].len() > 1 {
                model.add_row(
                    format!("one_count_t{t}_i{i}"),
                    q[t][i].iter().map(|&k| (k, 1.0)).collect(),
                    Relation::Le,
                    1.0,
                );
            }
        }
        let placed =
            class.resources.iter().flat_map(|&i| q[t][i].iter().enumerate().map(|(v, &k)| (k, (v + 1) as f64)));
        model.add_row(format!("class_size_t{t}"), placed.collect(), Relation::Eq, class.size as f64);
    }
    for i in 0..r {
        if vmax[i] == 0 {
            continue;
        }
        let mut row: Vec<(usize, f64)> = Vec::new();
        for qt in &q {
            row.extend(qt[i].iter().enumerate().map(|(v, &k)| (k, (v + 1) as f64)));
        }
        row.extend(levels.y[i].iter().enumerate().map(|(v, &k)| (k, -((v + 1) as f64))));
        model.add_row(format!("congestion_i{i}"), row, Relation::Eq, 0.0);
    }

    let m = model.big_m;
    for (t, class) in classes.iter().enumerate() {
        for &i in &class.resources {
            let stay = stay_cost(&game.follower_costs, &levels, i)?;
            for &j in class.resources.iter().filter(|&&j| j != i) {
                let (go, constant) = move_cost(&game.follower_costs, &levels, &sigma, j)?;
                let mut row = go;
                row.extend(stay.iter().map(|&(k, a)| (k, -a)));
                row.extend(q[t][i].iter().map(|&k| (k, -m)));
                model.add_row(format!("ne_t{t}_i{i}_j{j}"), row, Relation::Ge, -m - constant);
            }
        }
    }

    model.add_row("leader_simplex".into(), alpha.iter().map(|&k| (k, 1.0)).collect(), Relation::Eq, 1.0);
    add_objective(&mut model, game, &levels, &sigma)?;
    Ok(model)
}

/// Formulation for general games: binaries `x_{p,a}` pick each follower's
/// action and `α_a` is the probability of leader action `a`.
pub fn build_milp_general(game: &Game) -> Result<MilpModel, MilpError> {
    let followers = game.general_followers().ok_or(MilpError::WrongKind("general"))?;
    game.validate().into_result()?;
    let r = game.resources;
    let vmax: Vec<usize> = (0..r).map(|i| game.follower_capacity(i)).collect();
    let range = cost_range(game, &vmax)?;
    let hi: f64 = range.iter().map(|p| p.1.max(0.0)).sum();
    let lo: f64 = range.iter().map(|p| p.0.min(0.0)).sum();
    let mut model = MilpModel::new(GameKind::GeneralScg, 1.0 + hi - lo);

    let x: Vec<Vec<usize>> = followers
        .iter()
        .enumerate()
        .map(|(p, f)| {
            (0..f.actions.len())
                .map(|a| {
                    model.add_var(
                        format!("x_p{p}_a{a}"),
                        VarKind::Binary,
                        0.0,
                        1.0,
                        Entity::X { follower: p, action: a },
                    )
                })
                .collect()
        })
        .collect();
    let alpha: Vec<usize> = (0..game.leader_actions.len())
        .map(|a| model.add_var(format!("a{a}"), VarKind::Continuous, 0.0, 1.0, Entity::AlphaAction { action: a }))
        .collect();
    let mut sigma: Sigma = vec![Vec::new(); r];
    for (a, action) in game.leader_actions.iter().enumerate() {
        for &i in action {
            sigma[i].push((alpha[a], 1.0));
        }
    }
    let levels = add_levels(&mut model, &vmax, &sigma);

    for (p, xs) in x.iter().enumerate() {
        model.add_row(format!("one_action_p{p}"), xs.iter().map(|&k| (k, 1.0)).collect(), Relation::Eq, 1.0);
    }
    for i in 0..r {
        if vmax[i] == 0 {
            continue;
        }
        let mut row: Vec<(usize, f64)> = levels.y[i].iter().enumerate().map(|(v, &k)| (k, (v + 1) as f64)).collect();
        for (f, xs) in followers.iter().zip(&x) {
            for (a, action) in f.actions.iter().enumerate() {
                if action.contains(&i) {
                    row.push((xs[a], -1.0));
                }
            }
        }
        model.add_row(format!("congestion_i{i}"), row, Relation::Eq, 0.0);
    }

    let m = model.big_m;
    for (p, f) in followers.iter().enumerate() {
        for (a, current) in f.actions.iter().enumerate() {
            for (b, alt) in f.actions.iter().enumerate() {
                if a == b {
                    continue;
                }
                // resources in both actions cost the same either way
                let mut row: Vec<(usize, f64)> = vec![(x[p][a], -m)];
                let mut constant = 0.0;
                for &j in alt.iter().filter(|j| !current.contains(j)) {
                    let (go, c) = move_cost(&game.follower_costs, &levels, &sigma, j)?;
                    row.extend(go);
                    constant += c;
                }
                for &i in current.iter().filter(|i| !alt.contains(i)) {
                    row.extend(stay_cost(&game.follower_costs, &levels, i)?.into_iter().map(|(k, v)| (k, -v)));
                }
                model.add_row(format!("ne_p{p}_a{a}_b{b}"), row, Relation::Ge, -m - constant);
            }
        }
    }

    model.add_row("leader_simplex".into(), alpha.iter().map(|&k| (k, 1.0)).collect(), Relation::Eq, 1.0);
    add_objective(&mut model, game, &levels, &sigma)?;
    Ok(model)
}

/// The formulation matching the game's kind.
pub fn build_milp(game: &Game) -> Result<MilpModel, MilpError> {
    match game.kind() {
        GameKind::TclassSscg => build_milp_tclass(game),
        GameKind::GeneralScg => build_milp_general(game),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{CostTable, Follower, FollowerClass, FollowerStructure};

    fn pair_game() -> Game {
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
    fn tclass_variable_counts() {
        let m = build_milp_tclass(&pair_game()).unwrap();
        assert_eq!(m.count(|e| matches!(e, Entity::Q { .. })), 4);
        assert_eq!(m.count(|e| matches!(e, Entity::Y { .. })), 4);
        assert_eq!(m.count(|e| matches!(e, Entity::Z { .. })), 4);
        assert_eq!(m.count(|e| matches!(e, Entity::AlphaResource { .. })), 2);
        assert_eq!(m.big_m, 1.0 + 7.0 - 0.0);
        assert!(m.var("q_t0_i1_v2").is_some());
    }

    #[test]
    fn single_follower_class_has_one_level() {
        let mut g = pair_game();
        g.followers = FollowerStructure::Classes(vec![FollowerClass { size: 1, resources: vec![0, 1] }]);
        let m = build_milp_tclass(&g).unwrap();
        assert_eq!(m.count(|e| matches!(e, Entity::Q { .. })), 2);
    }

    #[test]
    fn general_rows_use_symmetric_difference() {
        let g = Game {
            resources: 3,
            leader_actions: vec![vec![2]],
            followers: FollowerStructure::General(vec![Follower { actions: vec![vec![0, 1], vec![1, 2]] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 3, 4]]),
            leader_costs: CostTable::from_integer_rows(&[vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 3, 4]]),
            metadata: None,
        };
        let m = build_milp_general(&g).unwrap();
        assert_eq!(m.constraints.iter().filter(|c| c.name.starts_with("one_action")).count(), 1);
        let ne: Vec<_> = m.constraints.iter().filter(|c| c.name.starts_with("ne_")).collect();
        assert_eq!(ne.len(), 2);
        let shared: Vec<usize> = ["y_i1_v1", "z_i1_v1"].iter().map(|n| m.var(n).unwrap()).collect();
        for row in ne {
            assert!(row.coeffs.iter().all(|(k, _)| !shared.contains(k)));
        }
    }
}
