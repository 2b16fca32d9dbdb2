use std::time::{Duration, Instant};

use anyhow::{bail, Result};
use clap::ValueEnum;
use scg_core::dp::{ose_pure_leader_symmetric_scg_until, ose_pure_leader_tclass_until, DpError};
use scg_core::game::to_f64;
use scg_core::milp::{
    build_milp, emit_lp_format, extract_ose, heuristic_incumbent, solve_milp, MilpParams, MilpStatus,
};
use scg_core::oracle::{ose_oracle_mixed_leader, ose_oracle_pure_leader};
use scg_core::solution::SolveRecord;
use scg_core::{Game, GameKind, LeaderStrategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Solver {
    Dp,
    Milp,
    OraclePure,
    OracleMixed,
    ExportLp,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::Dp => "dp",
            Solver::Milp => "milp",
            Solver::OraclePure => "oracle-pure",
            Solver::OracleMixed => "oracle-mixed",
            Solver::ExportLp => "export-lp",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveParams {
    pub time_limit: Option<Duration>,
    pub gap_tol: f64,
    pub cap: u128,
}

/// Whether `solver` can run on `game` at all.
pub fn applicable(solver: Solver, game: &Game) -> Result<()> {
    if solver == Solver::Dp {
        let ok = match game.kind() {
            GameKind::TclassSscg => game.is_singleton(),
            GameKind::GeneralScg => game.is_singleton() && game.symmetric_singleton_followers().is_some(),
        };
        if !ok {
            bail!("dp needs a singleton T-class game or singleton followers sharing one action set");
        }
    }
    Ok(())
}

fn run_dp(game: &Game, params: &SolveParams) -> Result<SolveRecord> {
    let deadline = params.time_limit.map(|t| Instant::now() + t);
    let result = match game.kind() {
        GameKind::TclassSscg => ose_pure_leader_tclass_until(game, deadline),
        GameKind::GeneralScg => ose_pure_leader_symmetric_scg_until(game, deadline),
    };
    match result {
        Ok(ose) => {
            let mut rec = SolveRecord::new("dp", "Optimal");
            let m = game.leader_actions.len();
            rec.set_solution(game, &LeaderStrategy::pure(ose.leader_action, m), &ose.outcome)?;
            let value = to_f64(&ose.leader_cost);
            rec.objective = Some(value);
            rec.lower_bound = Some(value);
            rec.gap = Some(0.0);
            Ok(rec)
        }
        Err(DpError::Timeout) => Ok(SolveRecord::new("dp", "Timeout")),
        Err(e) => Err(e.into()),
    }
}

fn run_milp(game: &Game, params: &SolveParams) -> Result<SolveRecord> {
    let model = build_milp(game)?;
    let initial = heuristic_incumbent(&model, game).ok();
    let milp_params =
        MilpParams { time_limit: params.time_limit, gap_tol: params.gap_tol, initial, ..MilpParams::default() };
    let sol = solve_milp(&model, &milp_params)?;
    let mut rec = SolveRecord::new("milp", sol.status.as_str());
    rec.objective = sol.objective;
    rec.lower_bound = sol.lower_bound.is_finite().then_some(sol.lower_bound);
    rec.gap = sol.gap;
    rec.nodes = Some(sol.nodes);
    if matches!(sol.status, MilpStatus::Optimal | MilpStatus::Timeout) && sol.values.is_some() {
        let ose = extract_ose(&model, &sol, game)?;
        rec.set_solution(game, &ose.strategy, &ose.outcome)?;
    }
    Ok(rec)
}

fn run_oracle(game: &Game, params: &SolveParams, mixed: bool) -> Result<SolveRecord> {
    let (name, ose) = if mixed {
        ("oracle-mixed", ose_oracle_mixed_leader(game, params.cap)?)
    } else {
        ("oracle-pure", ose_oracle_pure_leader(game, params.cap)?)
    };
    let mut rec = SolveRecord::new(name, "Optimal");
    rec.set_solution(game, &ose.strategy, &ose.outcome)?;
    let value = to_f64(&ose.leader_cost);
    rec.objective = Some(value);
    rec.lower_bound = Some(value);
    rec.gap = Some(0.0);
    Ok(rec)
}

/// Runs a solver and returns its result record; `export-lp` is handled by
/// [`lp_text`].
pub fn run(game: &Game, solver: Solver, params: &SolveParams) -> Result<SolveRecord> {
    applicable(solver, game)?;
    let start = Instant::now();
    let mut rec = match solver {
        Solver::Dp => run_dp(game, params)?,
        Solver::Milp => run_milp(game, params)?,
        Solver::OraclePure => run_oracle(game, params, false)?,
        Solver::OracleMixed => run_oracle(game, params, true)?,
        Solver::ExportLp => bail!("export-lp writes a model file instead of a result"),
    };
    rec.time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(rec)
}

pub fn lp_text(game: &Game) -> Result<String> {
    Ok(emit_lp_format(&build_milp(game)?))
}
