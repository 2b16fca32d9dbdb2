//! Solver result records and their independent re-verification.
//!
//! ```json
//! {
//!   "solver": "milp", "status": "Optimal",
//!   "objective": 6.0, "lower_bound": 6.0, "gap": 0.0,
//!   "strategy": ["1/4", "3/4"],
//!   "outcome": {"configurations": [[1, 1]]},
//!   "leader_cost": "6", "time_ms": 12.5, "nodes": 3
//! }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equilibrium::{find_deviation_tol, leader_cost};
use crate::format::parse_rational;
use crate::game::{to_f64, FollowersOutcome, Game, GameError, LeaderStrategy, Rational};

/// Slack allowed on NE inequalities and on float objectives when verifying.
pub const VERIFY_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SolutionError {
    #[error("{field}: cannot parse {text:?} as a rational")]
    Rational { field: String, text: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeRecord {
    Profile(Vec<usize>),
    Configurations(Vec<Vec<usize>>),
}

impl From<&FollowersOutcome> for OutcomeRecord {
    fn from(o: &FollowersOutcome) -> Self {
        match o {
            FollowersOutcome::Profile(p) => OutcomeRecord::Profile(p.clone()),
            FollowersOutcome::Configurations(c) => OutcomeRecord::Configurations(c.clone()),
        }
    }
}

impl From<&OutcomeRecord> for FollowersOutcome {
    fn from(o: &OutcomeRecord) -> Self {
        match o {
            OutcomeRecord::Profile(p) => FollowersOutcome::Profile(p.clone()),
            OutcomeRecord::Configurations(c) => FollowersOutcome::Configurations(c.clone()),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<String>,
    pub solver: String,
    pub status: String,
    #[serde(default)]
    pub objective: Option<f64>,
    #[serde(default)]
    pub lower_bound: Option<f64>,
    #[serde(default)]
    pub gap: Option<f64>,
    /// Leader distribution as exact `"p/q"` strings.
    #[serde(default)]
    pub strategy: Option<Vec<String>>,
    #[serde(default)]
    pub outcome: Option<OutcomeRecord>,
    /// Exact leader cost of `strategy` and `outcome`.
    #[serde(default)]
    pub leader_cost: Option<String>,
    #[serde(default)]
    pub time_ms: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
}

pub fn rational_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn parse(text: &str, field: &str) -> Result<Rational, SolutionError> {
    parse_rational(text).ok_or_else(|| SolutionError::Rational { field: field.into(), text: text.into() })
}

impl SolveRecord {
    pub fn new(solver: &str, status: &str) -> Self {
        SolveRecord { solver: solver.into(), status: status.into(), ..SolveRecord::default() }
    }

    /// Stores the pair together with its exact leader cost.
    pub fn set_solution(
        &mut self,
        game: &Game,
        strategy: &LeaderStrategy,
        outcome: &FollowersOutcome,
    ) -> Result<(), GameError> {
        let cost = leader_cost(game, strategy, outcome)?;
        self.strategy = Some(strategy.probs.iter().map(rational_string).collect());
        self.outcome = Some(outcome.into());
        self.leader_cost = Some(rational_string(&cost));
        Ok(())
    }

    pub fn strategy(&self) -> Result<Option<LeaderStrategy>, SolutionError> {
        self.strategy
            .as_ref()
            .map(|s| {
                let probs =
                    s.iter().enumerate().map(|(k, t)| parse(t, &format!("strategy[{k}]"))).collect::<Result<_, _>>()?;
                Ok(LeaderStrategy { probs })
            })
            .transpose()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SolutionError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: &'static str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name, passed, detail: detail.into() });
    }
}

/// Re-checks a record against `game`: the pair is well formed, the
/// followers are in equilibrium (exactly, or within [`VERIFY_TOL`]), and the
/// reported costs match a fresh evaluation.
pub fn verify_record(game: &Game, record: &SolveRecord) -> Result<VerifyReport, SolutionError> {
    let mut report = VerifyReport::default();
    let (Some(strategy), Some(outcome)) = (record.strategy()?, record.outcome.as_ref()) else {
        report.push("solution", false, format!("status {} carries no strategy and outcome", record.status));
        return Ok(report);
    };
    let outcome = FollowersOutcome::from(outcome);
    if let Err(e) = strategy.check(game) {
        report.push("strategy", false, e.to_string());
        return Ok(report);
    }
    report.push("strategy", true, "distribution over leader actions");
    if let Err(e) = outcome.check(game) {
        report.push("outcome", false, e.to_string());
        return Ok(report);
    }
    report.push("outcome", true, "valid followers' outcome");

    let zero = Rational::from_integer(0.into());
    let tol = Rational::from_float(VERIFY_TOL).expect("finite");
    match find_deviation_tol(game, &strategy, &outcome, &zero).expect("checked above") {
        None => report.push("nash", true, "exact"),
        Some(w) => match find_deviation_tol(game, &strategy, &outcome, &tol).expect("checked above") {
            None => report.push("nash", true, format!("within {VERIFY_TOL:e}")),
            Some(_) => report.push("nash", false, format!("profitable deviation: {w:?}")),
        },
    }

    let cost = leader_cost(game, &strategy, &outcome).expect("checked above");
    match &record.leader_cost {
        Some(text) => {
            let reported = parse(text, "leader_cost")?;
            if reported == cost {
                report.push("leader_cost", true, rational_string(&cost));
            } else {
                report.push("leader_cost", false, format!("reported {text}, recomputed {}", rational_string(&cost)));
            }
        }
        None => report.push("leader_cost", true, format!("not reported; recomputed {}", rational_string(&cost))),
    }
    if let Some(obj) = record.objective {
        let actual = to_f64(&cost);
        let ok = (obj - actual).abs() <= VERIFY_TOL * actual.abs().max(1.0);
        report.push("objective", ok, format!("reported {obj}, recomputed {actual}"));
    }
    Ok(report)
}
