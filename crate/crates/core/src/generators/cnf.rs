use std::fmt;

use num::{BigInt, One};
use rand::seq::index;
use serde_json::json;

use super::{stream, GeneratorError, RNG_NAME, STREAM_STRUCTURE};
use crate::format::rational_to_json;
use crate::game::{int, Action, CostTable, Follower, FollowerStructure, Game, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    fn holds(self, assignment: &[bool]) -> bool {
        assignment[self.var] != self.negated
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // DIMACS style, variables numbered from 1
        let v = self.var as i64 + 1;
        write!(f, "{}", if self.negated { -v } else { v })
    }
}

/// A 3-CNF formula over variables `0..vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfInstance {
    pub vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl CnfInstance {
    pub fn check(&self) -> Result<(), GeneratorError> {
        if let Some(l) = self.clauses.iter().flatten().find(|l| l.var >= self.vars) {
            return Err(GeneratorError::InvalidParameters(format!("literal {l} with {} variables", self.vars)));
        }
        Ok(())
    }

    /// Distinct literals of a clause in sorted order.
    pub fn clause_literals(&self, c: usize) -> Vec<Literal> {
        let mut lits = self.clauses[c].to_vec();
        lits.sort();
        lits.dedup();
        lits
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.holds(assignment)))
    }

    /// Clauses as DIMACS lines, e.g. `1 -2 3 0`.
    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        out
    }
}

/// A satisfying assignment, by exhaustive search (at most 20 variables).
pub fn is_satisfiable(cnf: &CnfInstance) -> Result<Option<Vec<bool>>, GeneratorError> {
    cnf.check()?;
    if cnf.vars > 20 {
        return Err(GeneratorError::InvalidParameters(format!("{} variables is too many to enumerate", cnf.vars)));
    }
    for mask in 0u32..(1 << cnf.vars) {
        let assignment: Vec<bool> = (0..cnf.vars).map(|v| mask >> v & 1 == 1).collect();
        if cnf.satisfied_by(&assignment) {
            return Ok(Some(assignment));
        }
    }
    Ok(None)
}

/// `⌊ratio·vars⌋` clauses, each made of three distinct literals drawn
/// uniformly from the `2·vars` available.
pub fn gen_random_3sat(vars: usize, ratio: f64, seed: u64) -> Result<CnfInstance, GeneratorError> {
    if vars < 2 || !(ratio.is_finite() && ratio > 0.0) {
        return Err(GeneratorError::InvalidParameters(format!("{vars} variables, clause ratio {ratio}")));
    }
    let count = (ratio * vars as f64).floor() as usize;
    let mut rng = stream(seed, STREAM_STRUCTURE);
    let clauses = (0..count)
        .map(|_| {
            let picked = index::sample(&mut rng, 2 * vars, 3).into_vec();
            let lit = |k: usize| Literal { var: k / 2, negated: k % 2 == 1 };
            [lit(picked[0]), lit(picked[1]), lit(picked[2])]
        })
        .collect();
    Ok(CnfInstance { vars, clauses })
}

/// Resource layout of the 3SAT game.
struct Layout {
    vars: usize,
}

impl Layout {
    const W: usize = 0;
    fn pos(&self, u: usize) -> usize {
        1 + 3 * u
    }
    fn neg(&self, u: usize) -> usize {
        2 + 3 * u
    }
    fn shared(&self, u: usize) -> usize {
        3 + 3 * u
    }
    fn clause(&self, c: usize) -> usize {
        1 + 3 * self.vars + c
    }
    fn literal(&self, l: Literal) -> usize {
        if l.negated {
            self.neg(l.var)
        } else {
            self.pos(l.var)
        }
    }
}

fn sorted(mut a: Action) -> Action {
    a.sort_unstable();
    a
}

/// Symmetric game whose OSE costs `epsilon` iff `cnf` is satisfiable, and
/// at least 1 otherwise.
///
/// Resources: `r_w`, then `r_u, r_ū, r_{u,t}` per variable, then one `r_φ`
/// per clause. Every player (leader included) chooses among `{r_u, r_{u,t}}`,
/// `{r_ū, r_{u,t}}`, `{r_w}` and `{r_φ, r_l}` for each distinct literal `l`
/// of each clause `φ`.
pub fn reduce_3sat(cnf: &CnfInstance, epsilon: &Rational) -> Result<Game, GeneratorError> {
    cnf.check()?;
    if *epsilon <= int(0) || *epsilon >= int(1) {
        return Err(GeneratorError::InvalidParameters(format!("epsilon {epsilon} outside (0, 1)")));
    }
    let lay = Layout { vars: cnf.vars };
    let r = 1 + 3 * cnf.vars + cnf.clauses.len();
    let mut actions: Vec<Action> = Vec::new();
    for u in 0..cnf.vars {
        actions.push(sorted(vec![lay.pos(u), lay.shared(u)]));
        actions.push(sorted(vec![lay.neg(u), lay.shared(u)]));
    }
    actions.push(vec![Layout::W]);
    for c in 0..cnf.clauses.len() {
        for l in cnf.clause_literals(c) {
            actions.push(sorted(vec![lay.clause(c), lay.literal(l)]));
        }
    }

    let followers = cnf.clauses.len() + cnf.vars;
    let n = followers + 1;
    let row = |first: Rational, rest: i64| {
        let mut v = vec![first];
        v.extend(std::iter::repeat_n(int(rest), n + 1));
        v
    };
    let mut rows = vec![Vec::new(); r];
    rows[Layout::W] = row(epsilon.clone(), 4);
    for u in 0..cnf.vars {
        rows[lay.pos(u)] = row(int(0), 2);
        rows[lay.neg(u)] = row(int(0), 2);
        rows[lay.shared(u)] = row(int(3), 5);
    }
    for c in 0..cnf.clauses.len() {
        rows[lay.clause(c)] = row(int(1), 5);
    }
    let costs = CostTable::from_rows(rows);

    Ok(Game {
        resources: r,
        leader_actions: actions.clone(),
        followers: FollowerStructure::General(vec![Follower { actions }; followers]),
        follower_costs: costs.clone(),
        leader_costs: costs,
        metadata: Some(json!({
            "generator": "3sat",
            "rng": RNG_NAME,
            "parameters": { "vars": cnf.vars, "clauses": cnf.clauses.len(), "epsilon": rational_to_json(epsilon) },
            "source": cnf.to_dimacs(),
        })),
    })
}

/// `2^-I` where `I` is the size of the game built by [`reduce_3sat`]: the
/// number of stored cost entries plus the number of resource slots over all
/// players' actions.
pub fn size_epsilon(cnf: &CnfInstance) -> Result<Rational, GeneratorError> {
    let probe = reduce_3sat(cnf, &Rational::new(BigInt::one(), BigInt::from(2)))?;
    let cost_entries: usize = (0..probe.resources)
        .map(|i| probe.follower_costs.max_congestion(i) + probe.leader_costs.max_congestion(i))
        .sum();
    let action_slots: usize =
        probe.expanded_followers().iter().chain(std::iter::once(&probe.leader_actions)).flatten().map(Vec::len).sum();
    let size = cost_entries + action_slots;
    Ok(Rational::new(BigInt::one(), BigInt::from(2).pow(size as u32)))
}
