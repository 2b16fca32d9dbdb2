//! Costs under a leader commitment, the Nash predicate, best-response
//! dynamics and exhaustive enumeration of followers' outcomes.

use num::{Signed, Zero};
use thiserror::Error;

use crate::game::{Action, CostTable, FollowerStructure, FollowersOutcome, Game, GameError, LeaderStrategy, Rational};

/// Default cap on the number of outcomes an enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Follower costs seen under a leader commitment:
/// `c^σ_i(x) = σ(i)·c_i(x+1) + (1 − σ(i))·c_i(x)`, precomputed for every `x`
/// with `x + 1` inside the table.
#[derive(Clone, Debug)]
pub struct ExpectedCostView {
    rows: Vec<Vec<Rational>>,
}

impl ExpectedCostView {
    pub fn new(costs: &CostTable, marginals: &[Rational]) -> Self {
        let rows = marginals
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let max = costs.max_congestion(i);
                (0..max)
                    .map(|x| {
                        let lo = costs.cost(i, x).expect("x < max");
                        let hi = costs.cost(i, x + 1).expect("x + 1 <= max");
                        if p.is_zero() {
                            lo.clone()
                        } else {
                            lo + p * (hi - lo)
                        }
                    })
                    .collect()
            })
            .collect();
        ExpectedCostView { rows }
    }

    pub fn for_strategy(game: &Game, strategy: &LeaderStrategy) -> Self {
        Self::new(&game.follower_costs, &strategy.marginals(game))
    }

    pub fn cost(&self, resource: usize, congestion: usize) -> Result<&Rational, GameError> {
        self.rows
            .get(resource)
            .and_then(|r| r.get(congestion))
            .ok_or(GameError::CostOutOfRange { resource, congestion: congestion + 1 })
    }
}

/// `p·c_i(x+1) + (1 − p)·c_i(x)`.
pub fn expected_follower_cost(
    costs: &CostTable,
    marginal: &Rational,
    resource: usize,
    congestion: usize,
) -> Result<Rational, GameError> {
    let lo = costs.cost(resource, congestion)?;
    let hi = costs.cost(resource, congestion + 1)?;
    Ok(lo + marginal * (hi - lo))
}

/// Expected leader cost `Σ_a σ(a) Σ_{i∈a} c_{i,ℓ}(ν_i + 1)`.
pub fn leader_cost(game: &Game, strategy: &LeaderStrategy, outcome: &FollowersOutcome) -> Result<Rational, GameError> {
    let nu = outcome.congestion(game);
    leader_cost_for_congestion(game, strategy, &nu)
}

pub(crate) fn leader_cost_for_congestion(
    game: &Game,
    strategy: &LeaderStrategy,
    nu: &[usize],
) -> Result<Rational, GameError> {
    let mut total = Rational::zero();
    for (action, p) in game.leader_actions.iter().zip(&strategy.probs) {
        if p.is_zero() {
            continue;
        }
        let mut c = Rational::zero();
        for &i in action {
            c += game.leader_costs.cost(i, nu[i] + 1)?;
        }
        total += p * c;
    }
    Ok(total)
}

/// Cost of a follower under `strategy`.
///
/// For a labeled profile, `who` is the follower and `action` any of her
/// action indices: the result is what she pays playing `action` while the
/// others keep theirs. For configurations, `who` is a class and `action` a
/// position in its resource list that the class currently occupies.
pub fn follower_cost(
    game: &Game,
    strategy: &LeaderStrategy,
    outcome: &FollowersOutcome,
    who: usize,
    action: usize,
) -> Result<Rational, GameError> {
    outcome.check(game)?;
    let view = ExpectedCostView::for_strategy(game, strategy);
    let nu = outcome.congestion(game);
    match outcome {
        FollowersOutcome::Profile(profile) => {
            let actions = game.expanded_followers();
            let current = &actions[who][profile[who]];
            let target = actions[who]
                .get(action)
                .ok_or_else(|| GameError::InvalidOutcome(format!("follower {who} has no action {action}")))?;
            let mut total = Rational::zero();
            for &i in target {
                let x = if current.contains(&i) { nu[i] } else { nu[i] + 1 };
                total += view.cost(i, x)?;
            }
            Ok(total)
        }
        FollowersOutcome::Configurations(configs) => {
            let class = &game.classes().expect("checked")[who];
            let i = *class
                .resources
                .get(action)
                .ok_or_else(|| GameError::InvalidOutcome(format!("class {who} has no action {action}")))?;
            if configs[who][i] == 0 {
                return Err(GameError::InvalidOutcome(format!("class {who} has nobody on resource {i}")));
            }
            Ok(view.cost(i, nu[i])?.clone())
        }
    }
}

/// An improving unilateral deviation.
///
/// For profiles `mover` is a follower and `from`/`to` are action indices; for
/// configurations `mover` is a class and `from`/`to` are resources.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeviationWitness {
    pub mover: usize,
    pub from: usize,
    pub to: usize,
    pub current_cost: Rational,
    pub deviated_cost: Rational,
}

/// Whether `outcome` is a pure NE of the followers' game under `strategy`.
pub fn is_nash(game: &Game, strategy: &LeaderStrategy, outcome: &FollowersOutcome) -> Result<bool, GameError> {
    Ok(find_deviation(game, strategy, outcome)?.is_none())
}

pub fn find_deviation(
    game: &Game,
    strategy: &LeaderStrategy,
    outcome: &FollowersOutcome,
) -> Result<Option<DeviationWitness>, GameError> {
    find_deviation_tol(game, strategy, outcome, &Rational::zero())
}

/// Like [`find_deviation`], but a deviation only counts when it saves more
/// than `tol`.
pub fn find_deviation_tol(
    game: &Game,
    strategy: &LeaderStrategy,
    outcome: &FollowersOutcome,
    tol: &Rational,
) -> Result<Option<DeviationWitness>, GameError> {
    outcome.check(game)?;
    strategy.check(game)?;
    let view = ExpectedCostView::for_strategy(game, strategy);
    let nu = outcome.congestion(game);
    deviation_in(game, &view, outcome, &nu, tol)
}

pub(crate) fn deviation_in(
    game: &Game,
    view: &ExpectedCostView,
    outcome: &FollowersOutcome,
    nu: &[usize],
    tol: &Rational,
) -> Result<Option<DeviationWitness>, GameError> {
    match outcome {
        FollowersOutcome::Profile(profile) => {
            let actions = game.expanded_followers();
            for (p, (&a, list)) in profile.iter().zip(&actions).enumerate() {
                let current = &list[a];
                for (k, alt) in list.iter().enumerate() {
                    if k == a {
                        continue;
                    }
                    let (stay, go) = swap_costs(view, current, alt, nu)?;
                    if &stay - &go > *tol {
                        let shared = shared_cost(view, current, alt, nu)?;
                        return Ok(Some(DeviationWitness {
                            mover: p,
                            from: a,
                            to: k,
                            current_cost: &stay + &shared,
                            deviated_cost: &go + &shared,
                        }));
                    }
                }
            }
            Ok(None)
        }
        FollowersOutcome::Configurations(configs) => {
            let classes = game.classes().expect("checked by outcome.check");
            for (t, (cfg, class)) in configs.iter().zip(classes).enumerate() {
                for &i in &class.resources {
                    if cfg[i] == 0 {
                        continue;
                    }
                    let stay = view.cost(i, nu[i])?;
                    for &j in &class.resources {
                        if j == i {
                            continue;
                        }
                        let go = view.cost(j, nu[j] + 1)?;
                        if stay - go > *tol {
                            return Ok(Some(DeviationWitness {
                                mover: t,
                                from: i,
                                to: j,
                                current_cost: stay.clone(),
                                deviated_cost: go.clone(),
                            }));
                        }
                    }
                }
            }
            Ok(None)
        }
    }
}

/// Costs over the symmetric difference of `current` and `alt`: what the
/// follower stops paying and what she starts paying.
fn swap_costs(
    view: &ExpectedCostView,
    current: &Action,
    alt: &Action,
    nu: &[usize],
) -> Result<(Rational, Rational), GameError> {
    let mut stay = Rational::zero();
    for &i in current.iter().filter(|i| !alt.contains(i)) {
        stay += view.cost(i, nu[i])?;
    }
    let mut go = Rational::zero();
    for &i in alt.iter().filter(|i| !current.contains(i)) {
        go += view.cost(i, nu[i] + 1)?;
    }
    Ok((stay, go))
}

fn shared_cost(view: &ExpectedCostView, current: &Action, alt: &Action, nu: &[usize]) -> Result<Rational, GameError> {
    let mut total = Rational::zero();
    for &i in current.iter().filter(|i| alt.contains(i)) {
        total += view.cost(i, nu[i])?;
    }
    Ok(total)
}

/// Rosenthal's potential `Σ_i Σ_{x=1..ν_i} c^σ_i(x)` of the followers' game.
pub fn rosenthal_potential(
    game: &Game,
    strategy: &LeaderStrategy,
    outcome: &FollowersOutcome,
) -> Result<Rational, GameError> {
    let view = ExpectedCostView::for_strategy(game, strategy);
    potential_in(&view, &outcome.congestion(game))
}

fn potential_in(view: &ExpectedCostView, nu: &[usize]) -> Result<Rational, GameError> {
    let mut total = Rational::zero();
    for (i, &k) in nu.iter().enumerate() {
        for x in 1..=k {
            total += view.cost(i, x)?;
        }
    }
    Ok(total)
}

#[derive(Debug, Error)]
pub enum BrdError {
    #[error("best-response dynamics did not converge within {0} steps")]
    BudgetExhausted(usize),
    #[error(transparent)]
    Game(#[from] GameError),
}

/// Result of a best-response run: the final outcome, the number of moves and
/// the potential before the first move and after each one.
#[derive(Clone, Debug)]
pub struct BrdRun {
    pub outcome: FollowersOutcome,
    pub steps: usize,
    pub potentials: Vec<Rational>,
}

/// `n·r·(n·r + 1)`.
pub fn default_step_budget(game: &Game) -> usize {
    let nr = game.player_count() * game.resources;
    nr * (nr + 1)
}

/// Runs best-response dynamics from `start`.
///
/// Followers (for configurations: occupied `(class, resource)` slots) are
/// scanned round-robin; each step moves one follower to her cheapest
/// strictly improving action, ties going to the lowest index. Stops after a
/// full pass without moves.
pub fn best_response_dynamics(
    game: &Game,
    strategy: &LeaderStrategy,
    start: &FollowersOutcome,
    max_steps: Option<usize>,
) -> Result<BrdRun, BrdError> {
    start.check(game)?;
    strategy.check(game)?;
    let budget = max_steps.unwrap_or_else(|| default_step_budget(game));
    let view = ExpectedCostView::for_strategy(game, strategy);
    let mut outcome = start.clone();
    let mut nu = outcome.congestion(game);
    let mut potentials = vec![potential_in(&view, &nu)?];
    let mut steps = 0;

    loop {
        let moved = match &mut outcome {
            FollowersOutcome::Profile(profile) => {
                let actions = game.expanded_followers();
                brd_pass_profile(&view, &actions, profile, &mut nu, &mut steps, budget, &mut potentials)?
            }
            FollowersOutcome::Configurations(configs) => {
                let FollowerStructure::Classes(classes) = &game.followers else {
                    unreachable!("checked by start.check");
                };
                let mut moved = false;
                for (t, class) in classes.iter().enumerate() {
                    for &i in &class.resources {
                        if configs[t][i] > 0 {
                            let stay = view.cost(i, nu[i])?.clone();
                            let mut best: Option<(usize, Rational)> = None;
                            for &j in class.resources.iter().filter(|&&j| j != i) {
                                let go = view.cost(j, nu[j] + 1)?;
                                if best.as_ref().is_none_or(|(_, b)| go < b) {
                                    best = Some((j, go.clone()));
                                }
                            }
                            match best {
                                Some((j, go)) if go < stay => {
                                    if steps == budget {
                                        return Err(BrdError::BudgetExhausted(budget));
                                    }
                                    configs[t][i] -= 1;
                                    configs[t][j] += 1;
                                    nu[i] -= 1;
                                    nu[j] += 1;
                                    steps += 1;
                                    potentials.push(potential_in(&view, &nu)?);
                                    moved = true;
                                }
                                _ => {}
                            }
                        }
                    }
                }
                moved
            }
        };
        if !moved {
            return Ok(BrdRun { outcome, steps, potentials });
        }
    }
}

fn brd_pass_profile(
    view: &ExpectedCostView,
    actions: &[Vec<Action>],
    profile: &mut [usize],
    nu: &mut [usize],
    steps: &mut usize,
    budget: usize,
    potentials: &mut Vec<Rational>,
) -> Result<bool, BrdError> {
    let mut moved = false;
    for p in 0..profile.len() {
        let list = &actions[p];
        let a = profile[p];
        // relative cost of each alternative: gain = stay - go on the symmetric difference
        let mut best: Option<(usize, Rational)> = None;
        for (k, alt) in list.iter().enumerate() {
            if k == a {
                continue;
            }
            let (stay, go) = swap_costs(view, &list[a], alt, nu)?;
            let delta = go - stay;
            if best.as_ref().is_none_or(|(_, d)| delta < *d) {
                best = Some((k, delta));
            }
        }
        if let Some((k, delta)) = best {
            if delta.is_negative() {
                if *steps == budget {
                    return Err(BrdError::BudgetExhausted(budget));
                }
                for &i in &list[a] {
                    nu[i] -= 1;
                }
                for &i in &list[k] {
                    nu[i] += 1;
                }
                profile[p] = k;
                *steps += 1;
                potentials.push(potential_in(view, nu)?);
                moved = true;
            }
        }
    }
    Ok(moved)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnumerationError {
    #[error("enumeration needs {estimate} outcomes, above the cap of {cap}")]
    CapExceeded { estimate: u128, cap: u128 },
}

/// Number of ways to split `n` identical items over `k` bins.
pub fn composition_count(n: usize, k: usize) -> u128 {
    if k == 0 {
        return u128::from(n == 0);
    }
    binomial((n + k - 1) as u128, (k - 1) as u128)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc.saturating_mul(n - j) / (j + 1);
    }
    acc
}

/// All vectors of `k` non-negative integers summing to `n`, in
/// lexicographically decreasing order.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 1 {
            prefix.push(n);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in (0..=n).rev() {
            prefix.push(first);
            rec(n - first, k - 1, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        if n == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Lazily enumerates outcomes as a mixed-radix counter over per-slot
/// choices.
pub struct OutcomeIter {
    choices: Vec<Vec<Vec<usize>>>,
    counter: Vec<usize>,
    done: bool,
    shape: Shape,
}

enum Shape {
    // each slot is a single follower, choice = [action]
    Labeled,
    // each slot is a class, choice = full-length configuration
    Classes,
    // each slot is a group of identical followers, choice = multiplicity per action
    Groups { members: Vec<Vec<usize>>, followers: usize },
}

impl OutcomeIter {
    fn new(choices: Vec<Vec<Vec<usize>>>, shape: Shape) -> Self {
        let done = choices.iter().any(Vec::is_empty);
        OutcomeIter { counter: vec![0; choices.len()], choices, done, shape }
    }

    fn current(&self) -> FollowersOutcome {
        let picks = self.counter.iter().zip(&self.choices).map(|(&c, ch)| &ch[c]);
        match &self.shape {
            Shape::Labeled => FollowersOutcome::Profile(picks.map(|c| c[0]).collect()),
            Shape::Classes => FollowersOutcome::Configurations(picks.cloned().collect()),
            Shape::Groups { members, followers } => {
                let mut profile = vec![0; *followers];
                for (mult, group) in picks.zip(members) {
                    let mut slot = group.iter();
                    for (k, &m) in mult.iter().enumerate() {
                        for _ in 0..m {
                            profile[*slot.next().expect("multiplicities sum to group size")] = k;
                        }
                    }
                }
                FollowersOutcome::Profile(profile)
            }
        }
    }
}

impl Iterator for OutcomeIter {
    type Item = FollowersOutcome;

    fn next(&mut self) -> Option<FollowersOutcome> {
        if self.done {
            return None;
        }
        let out = self.current();
        // advance, last slot fastest
        let mut pos = self.counter.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counter[pos] += 1;
            if self.counter[pos] < self.choices[pos].len() {
                break;
            }
            self.counter[pos] = 0;
        }
        Some(out)
    }
}

/// Number of outcomes [`enumerate_outcomes`] would produce.
pub fn outcome_count(game: &Game) -> u128 {
    match &game.followers {
        FollowerStructure::General(f) => f.iter().fold(1u128, |acc, f| acc.saturating_mul(f.actions.len() as u128)),
        FollowerStructure::Classes(c) => {
            c.iter().fold(1u128, |acc, c| acc.saturating_mul(composition_count(c.size, c.resources.len())))
        }
    }
}

/// Every followers' outcome: labeled profiles for general games, per-class
/// configurations for T-class games.
pub fn enumerate_outcomes(game: &Game, cap: u128) -> Result<OutcomeIter, EnumerationError> {
    let estimate = outcome_count(game);
    if estimate > cap {
        return Err(EnumerationError::CapExceeded { estimate, cap });
    }
    Ok(match &game.followers {
        FollowerStructure::General(followers) => OutcomeIter::new(
            followers.iter().map(|f| (0..f.actions.len()).map(|k| vec![k]).collect()).collect(),
            Shape::Labeled,
        ),
        FollowerStructure::Classes(classes) => OutcomeIter::new(
            classes
                .iter()
                .map(|c| {
                    compositions(c.size, c.resources.len())
                        .into_iter()
                        .map(|parts| {
                            let mut cfg = vec![0; game.resources];
                            for (&i, k) in c.resources.iter().zip(parts) {
                                cfg[i] = k;
                            }
                            cfg
                        })
                        .collect()
                })
                .collect(),
            Shape::Classes,
        ),
    })
}

/// Followers of a general game grouped by identical action lists.
pub fn symmetry_groups(game: &Game) -> Vec<Vec<usize>> {
    let Some(followers) = game.general_followers() else {
        return Vec::new();
    };
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (p, f) in followers.iter().enumerate() {
        match groups.iter_mut().find(|g| followers[g[0]].actions == f.actions) {
            Some(g) => g.push(p),
            None => groups.push(vec![p]),
        }
    }
    groups
}

/// Outcomes modulo permutations of followers with identical action lists.
///
/// Costs and the Nash predicate are invariant under such permutations, so
/// this visits one representative per orbit. T-class games are already
/// enumerated by configuration and fall back to [`enumerate_outcomes`].
pub fn enumerate_outcomes_up_to_symmetry(game: &Game, cap: u128) -> Result<OutcomeIter, EnumerationError> {
    let Some(followers) = game.general_followers() else {
        return enumerate_outcomes(game, cap);
    };
    let groups = symmetry_groups(game);
    let estimate = groups
        .iter()
        .fold(1u128, |acc, g| acc.saturating_mul(composition_count(g.len(), followers[g[0]].actions.len())));
    if estimate > cap {
        return Err(EnumerationError::CapExceeded { estimate, cap });
    }
    let choices = groups.iter().map(|g| compositions(g.len(), followers[g[0]].actions.len())).collect();
    Ok(OutcomeIter::new(choices, Shape::Groups { members: groups, followers: followers.len() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{int, rational, FollowerClass};

    /// 2 followers, one class on both resources, c_1 = [1, 3], c_2 = [2, 5].
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
    fn expected_cost_endpoints() {
        let costs = CostTable::from_integer_rows(&[vec![4, 9, 11]]);
        for x in 0..3 {
            assert_eq!(expected_follower_cost(&costs, &int(0), 0, x).unwrap(), *costs.cost(0, x).unwrap());
            assert_eq!(expected_follower_cost(&costs, &int(1), 0, x).unwrap(), *costs.cost(0, x + 1).unwrap());
        }
        assert!(expected_follower_cost(&costs, &int(1), 0, 3).is_err());
    }

    #[test]
    fn expected_cost_partition_gadget_value() {
        // c(1) = 2/K and c(2) = (6K-2)/(2K^2-K) at K = 2, marginal (2K-1)/2K
        let costs = CostTable::from_rows(vec![vec![int(1), rational(5, 3)]]);
        assert_eq!(expected_follower_cost(&costs, &rational(3, 4), 0, 1).unwrap(), rational(3, 2));
    }

    #[test]
    fn leader_cost_examples() {
        let g = pair_game();
        let empty = FollowersOutcome::Configurations(vec![vec![0, 2]]);
        assert_eq!(leader_cost(&g, &LeaderStrategy::pure(0, 2), &empty).unwrap(), int(1));
        // uniform over both: (c_1(0+1) + c_2(2+1)) / 2 = (1 + 6) / 2
        assert_eq!(leader_cost(&g, &LeaderStrategy::uniform(2), &empty).unwrap(), rational(7, 2));
    }

    #[test]
    fn follower_cost_sums_over_action() {
        let g = Game {
            resources: 3,
            leader_actions: vec![vec![2]],
            followers: FollowerStructure::General(vec![
                Follower { actions: vec![vec![0, 1], vec![2]] },
                Follower { actions: vec![vec![1]] },
            ]),
            follower_costs: CostTable::from_integer_rows(&[vec![7, 8, 9], vec![10, 20, 30, 40], vec![1, 2, 3, 4]]),
            leader_costs: CostTable::from_integer_rows(&[vec![7, 8, 9], vec![10, 20, 30, 40], vec![1, 2, 3, 4]]),
            metadata: None,
        };
        let out = FollowersOutcome::Profile(vec![0, 0]);
        // congestions (1, 2): c_a(1) + c_b(2)
        assert_eq!(follower_cost(&g, &LeaderStrategy::pure(0, 1), &out, 0, 0).unwrap(), int(27));
        // deviating to resource 2 where the leader sits: c_2(0 + 1 + 1)
        assert_eq!(follower_cost(&g, &LeaderStrategy::pure(0, 1), &out, 0, 1).unwrap(), int(2));
    }

    use crate::game::Follower;

    /// The pair game with the leader parked on a third resource, so the
    /// followers see no leader mass.
    fn pair_game_no_mass() -> Game {
        Game {
            resources: 3,
            leader_actions: vec![vec![2]],
            followers: FollowerStructure::Classes(vec![FollowerClass { size: 2, resources: vec![0, 1] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![1, 3, 4, 5, 6], vec![2, 5, 6, 7, 8], vec![1, 1, 1]]),
            leader_costs: CostTable::from_integer_rows(&[vec![1, 3, 4, 5, 6], vec![2, 5, 6, 7, 8], vec![1, 1, 1]]),
            metadata: None,
        }
    }

    #[test]
    fn pair_game_deviation_witness() {
        let g = pair_game_no_mass();
        let leader = LeaderStrategy::pure(0, 1);
        let crowded = FollowersOutcome::Configurations(vec![vec![2, 0, 0]]);
        let w = find_deviation(&g, &leader, &crowded).unwrap().unwrap();
        assert_eq!((w.mover, w.from, w.to), (0, 0, 1));
        assert_eq!((w.current_cost, w.deviated_cost), (int(3), int(2)));
        assert!(!is_nash(&g, &leader, &crowded).unwrap());

        let split = FollowersOutcome::Configurations(vec![vec![1, 1, 0]]);
        assert!(is_nash(&g, &leader, &split).unwrap());
    }

    #[test]
    fn brd_fixpoint_and_convergence() {
        let g = pair_game_no_mass();
        let leader = LeaderStrategy::pure(0, 1);
        let split = FollowersOutcome::Configurations(vec![vec![1, 1, 0]]);
        let run = best_response_dynamics(&g, &leader, &split, None).unwrap();
        assert_eq!(run.outcome, split);
        assert_eq!(run.steps, 0);

        let crowded = FollowersOutcome::Configurations(vec![vec![2, 0, 0]]);
        let run = best_response_dynamics(&g, &leader, &crowded, None).unwrap();
        assert_eq!(run.outcome, split);
        assert_eq!(run.steps, 1);
        assert!(run.potentials.windows(2).all(|w| w[1] < w[0]));

        // the same run on a labeled profile
        let labeled = crowded.to_profile(&g).unwrap();
        let run = best_response_dynamics(&g, &leader, &labeled, None).unwrap();
        assert_eq!(run.outcome.to_configurations(&g).unwrap(), split);
        assert!(matches!(best_response_dynamics(&g, &leader, &crowded, Some(0)), Err(BrdError::BudgetExhausted(0))));
    }

    #[test]
    fn single_resource_is_always_nash() {
        let g = Game {
            resources: 1,
            leader_actions: vec![vec![0]],
            followers: FollowerStructure::Classes(vec![FollowerClass { size: 1, resources: vec![0] }]),
            follower_costs: CostTable::from_integer_rows(&[vec![9, 1, 1, 1]]),
            leader_costs: CostTable::from_integer_rows(&[vec![9, 1, 1, 1]]),
            metadata: None,
        };
        let out = FollowersOutcome::Configurations(vec![vec![1]]);
        assert!(is_nash(&g, &LeaderStrategy::pure(0, 1), &out).unwrap());
    }

    #[test]
    fn compositions_are_counted_and_listed() {
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(composition_count(2, 2), 3);
        assert_eq!(composition_count(3, 5), 35);
        assert_eq!(compositions(3, 5).len(), 35);
        assert_eq!(composition_count(0, 0), 1);
        assert_eq!(composition_count(6, 16), 54264);
    }

    #[test]
    fn enumeration_counts() {
        let g = pair_game();
        let all: Vec<_> = enumerate_outcomes(&g, DEFAULT_ENUMERATION_CAP).unwrap().collect();
        assert_eq!(all.len(), 3);

        let general = Game {
            resources: 3,
            leader_actions: vec![vec![0]],
            followers: FollowerStructure::General(vec![Follower { actions: vec![vec![0], vec![1], vec![2]] }; 2]),
            follower_costs: CostTable::from_integer_rows(&[vec![1; 5], vec![1; 4], vec![1; 4]]),
            leader_costs: CostTable::from_integer_rows(&[vec![1; 5], vec![1; 4], vec![1; 4]]),
            metadata: None,
        };
        assert_eq!(enumerate_outcomes(&general, 100).unwrap().count(), 9);
        assert_eq!(enumerate_outcomes_up_to_symmetry(&general, 100).unwrap().count(), 6);
        assert_eq!(enumerate_outcomes(&general, 8).err(), Some(EnumerationError::CapExceeded { estimate: 9, cap: 8 }));
    }
}
