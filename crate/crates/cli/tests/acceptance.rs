//! End-to-end acceptance run: one PASS/FAIL line per criterion.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{brute_force_lp, BruteLp};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scg_core::dp::ose_pure_leader_tclass;
use scg_core::equilibrium::{best_response_dynamics, is_nash, leader_cost, DEFAULT_ENUMERATION_CAP};
use scg_core::game::{int, rational, to_f64};
use scg_core::generators::{
    find_partition, gen_random_scg, gen_random_tclass, is_satisfiable, kpartition_witness, reduce_3sat,
    reduce_kpartition, CnfInstance, KPartitionInstance, Literal, ScgParams, TclassParams,
};
use scg_core::lp::{solve_lp, LpProblem, LpStatus, Relation};
use scg_core::milp::{build_milp, extract_ose, solve_milp, MilpParams, MilpStatus, DECODE_TOL};
use scg_core::oracle::{ose_oracle_mixed_leader, ose_oracle_pure_leader};
use scg_core::{FollowersOutcome, Game, LeaderStrategy};

const MILP_ORACLE_TOL: f64 = 1e-6;
const KPARTITION_TOL: f64 = 1e-6;
const LP_TOL: f64 = 1e-8;
const SCALE_LIMIT: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tclass(r: usize, sizes: Vec<usize>, monotone: bool, cost_max: Option<u64>, seed: u64) -> Game {
    gen_random_tclass(&TclassParams { resources: r, class_sizes: sizes, monotone, cost_max }, seed).unwrap()
}

fn crowded_start(game: &Game) -> FollowersOutcome {
    let start = FollowersOutcome::Profile(vec![0; game.follower_count()]);
    start.to_configurations(game).unwrap_or(start)
}

fn dp_matches_pure_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for seed in 0..200u64 {
        let t = rng.random_range(1..=3);
        let sizes = (0..t).map(|_| rng.random_range(1..=3)).collect();
        let game = tclass(rng.random_range(2..=5), sizes, seed % 2 == 0, Some(20), seed);
        let dp = ose_pure_leader_tclass(&game).map_err(|e| format!("seed {seed}: {e}"))?;
        let oracle = ose_oracle_pure_leader(&game, DEFAULT_ENUMERATION_CAP).map_err(|e| format!("seed {seed}: {e}"))?;
        let sigma = LeaderStrategy::pure(dp.leader_action, game.leader_actions.len());
        ensure(dp.leader_cost == oracle.leader_cost, || {
            format!("seed {seed}: dp {} vs oracle {}", dp.leader_cost, oracle.leader_cost)
        })?;
        ensure(is_nash(&game, &sigma, &dp.outcome).unwrap(), || format!("seed {seed}: dp outcome is not an NE"))?;
    }
    Ok("200 games, exact equality".into())
}

fn milp_matches_mixed_oracle(games: impl Iterator<Item = Game>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (k, game) in games.enumerate() {
        let oracle = ose_oracle_mixed_leader(&game, DEFAULT_ENUMERATION_CAP).map_err(|e| format!("#{k}: {e}"))?;
        let model = build_milp(&game).map_err(|e| format!("#{k}: {e}"))?;
        let sol = solve_milp(&model, &MilpParams::default()).map_err(|e| format!("#{k}: {e}"))?;
        ensure(sol.status == MilpStatus::Optimal, || format!("#{k}: status {:?}", sol.status))?;
        let err = (sol.objective.unwrap() - to_f64(&oracle.leader_cost)).abs();
        worst = worst.max(err);
        ensure(err <= MILP_ORACLE_TOL, || format!("#{k}: |milp - oracle| = {err:e}"))?;
        let ose = extract_ose(&model, &sol, &game).map_err(|e| format!("#{k}: decode: {e}"))?;
        ensure((to_f64(&ose.leader_cost) - sol.objective.unwrap()).abs() <= DECODE_TOL, || {
            format!("#{k}: decoded cost differs from objective")
        })?;
        count += 1;
    }
    Ok(format!("{count} games, max |difference| {worst:.1e} (tol {MILP_ORACLE_TOL:e})"))
}

fn tclass_milp_games() -> impl Iterator<Item = Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    (0..100u64).map(move |seed| {
        let t = rng.random_range(1..=2);
        let sizes = (0..t).map(|_| rng.random_range(1..=3)).collect();
        tclass(rng.random_range(2..=4), sizes, rng.random_bool(0.5), None, seed)
    })
}

fn general_milp_games() -> impl Iterator<Item = Game> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    (0..100u64).map(move |seed| {
        let r = rng.random_range(2..=4);
        let action_size = rng.random_range(1..=2.min(r));
        let max_actions = if action_size == 1 { r } else { r * (r - 1) / 2 };
        let params = ScgParams {
            resources: r,
            players: rng.random_range(2..=4),
            action_size,
            actions_per_player: Some(rng.random_range(1..=3.min(max_actions))),
            monotone: rng.random_bool(0.5),
            cost_max: None,
        };
        gen_random_scg(&params, seed).unwrap()
    })
}

fn random_cnf(rng: &mut ChaCha8Rng) -> CnfInstance {
    let vars = rng.random_range(1..=3);
    let clauses = rng.random_range(1..=3);
    let mut lit = || Literal { var: rng.random_range(0..vars), negated: rng.random_bool(0.5) };
    CnfInstance { vars, clauses: (0..clauses).map(|_| [lit(), lit(), lit()]).collect() }
}

fn three_sat_soundness() -> Outcome {
    // literals are drawn with replacement so that short formulas can be unsatisfiable
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps = rational(1, 4);
    let (mut sat, mut unsat) = (0, 0);
    while sat + unsat < 20 {
        let cnf = random_cnf(&mut rng);
        let satisfiable = is_satisfiable(&cnf).unwrap().is_some();
        if (satisfiable && sat == 10) || (!satisfiable && unsat == 10) {
            continue;
        }
        let game = reduce_3sat(&cnf, &eps).unwrap();
        let ose = ose_oracle_mixed_leader(&game, DEFAULT_ENUMERATION_CAP).map_err(|e| e.to_string())?;
        if satisfiable {
            ensure(ose.leader_cost == eps, || {
                format!("satisfiable {} has value {}", cnf.to_dimacs(), ose.leader_cost)
            })?;
            sat += 1;
        } else {
            ensure(ose.leader_cost >= int(1), || {
                format!("unsatisfiable {} has value {}", cnf.to_dimacs(), ose.leader_cost)
            })?;
            unsat += 1;
        }
    }
    Ok(format!("{sat} satisfiable (value exactly 1/4), {unsat} unsatisfiable (value >= 1)"))
}

fn kpartition_if_direction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    let mut largest_k = 0;
    while done < 10 {
        let k = rng.random_range(1..=2);
        let values: Vec<u64> = (0..4).map(|_| rng.random_range(1..=6)).collect();
        let inst = KPartitionInstance { values, k };
        if inst.check().is_err() || inst.values.iter().any(|&s| s > inst.half()) {
            continue;
        }
        let Some(chosen) = find_partition(&inst).unwrap() else { continue };
        let game = reduce_kpartition(&inst).map_err(|e| e.to_string())?;
        let bound = int(2 * inst.half() as i64) - rational(inst.half() as i64, k as i64);

        let w = kpartition_witness(&inst, &chosen).map_err(|e| e.to_string())?;
        ensure(is_nash(&game, &w.strategy, &w.outcome).unwrap(), || format!("{inst:?}: witness is not an NE"))?;
        let cost = leader_cost(&game, &w.strategy, &w.outcome).unwrap();
        ensure(cost == bound, || format!("{inst:?}: witness costs {cost}, bound {bound}"))?;

        let sol = solve_milp(&build_milp(&game).unwrap(), &MilpParams::default()).map_err(|e| e.to_string())?;
        ensure(sol.status == MilpStatus::Optimal, || format!("{inst:?}: status {:?}", sol.status))?;
        let obj = sol.objective.unwrap();
        ensure(obj <= to_f64(&bound) + KPARTITION_TOL, || format!("{inst:?}: objective {obj} above {bound}"))?;
        largest_k = largest_k.max(k);
        done += 1;
    }
    Ok(format!("10 yes-instances, witnesses exact, MILP <= 2X - X/K; only-if direction skipped (K <= {largest_k} < 4)"))
}

fn brd_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut total_steps = 0;
    for seed in 0..500u64 {
        let r = rng.random_range(2..=6);
        let game = if seed % 2 == 0 {
            let t = rng.random_range(1..=2);
            let sizes = (0..t).map(|_| rng.random_range(1..=5 / t)).collect();
            tclass(r, sizes, rng.random_bool(0.5), None, seed)
        } else {
            let params = ScgParams {
                resources: r,
                players: rng.random_range(2..=6),
                action_size: rng.random_range(1..=2.min(r)),
                actions_per_player: None,
                monotone: rng.random_bool(0.5),
                cost_max: None,
            };
            gen_random_scg(&params, seed).unwrap()
        };
        let m = game.leader_actions.len();
        let sigma = LeaderStrategy::pure(rng.random_range(0..m), m);
        let run = best_response_dynamics(&game, &sigma, &crowded_start(&game), None)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(is_nash(&game, &sigma, &run.outcome).unwrap(), || format!("seed {seed}: result is not an NE"))?;
        ensure(run.potentials.windows(2).all(|w| w[1] < w[0]), || format!("seed {seed}: potential did not decrease"))?;
        total_steps += run.steps;
    }
    Ok(format!("500 runs, {total_steps} improving moves, potential strictly decreasing"))
}

fn milp_feasibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..100u64 {
        let game = if seed % 2 == 0 {
            let t = rng.random_range(1..=3);
            let sizes = (0..t).map(|_| rng.random_range(1..=3)).collect();
            tclass(rng.random_range(2..=6), sizes, rng.random_bool(0.5), None, seed)
        } else {
            let r = rng.random_range(2..=6);
            let params = ScgParams {
                resources: r,
                players: rng.random_range(2..=5),
                action_size: rng.random_range(1..=2.min(r)),
                actions_per_player: None,
                monotone: rng.random_bool(0.5),
                cost_max: None,
            };
            gen_random_scg(&params, seed).unwrap()
        };
        let sol = solve_milp(&build_milp(&game).unwrap(), &MilpParams::default()).map_err(|e| e.to_string())?;
        ensure(sol.status == MilpStatus::Optimal, || format!("seed {seed}: status {:?}", sol.status))?;
    }
    Ok("100 models, all solved to optimality, none infeasible".into())
}

fn lp_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut optimal, mut infeasible, mut unbounded) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let n = rng.random_range(1..=6);
        let m = rng.random_range(0..=8);
        let mut lp = LpProblem::new(n);
        lp.objective = (0..n).map(|_| rng.random_range(-5..=5) as f64).collect();
        // three in four problems contain a known point, the rest are unconstrained draws
        let planted: Option<Vec<i32>> = (k % 4 != 3).then(|| (0..n).map(|_| rng.random_range(0..=3)).collect());
        for _ in 0..m {
            let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (j, rng.random_range(-4..=4) as f64)).collect();
            let rel = match rng.random_range(0..5) {
                0 | 1 => Relation::Le,
                2 | 3 => Relation::Ge,
                _ => Relation::Eq,
            };
            let rhs = match &planted {
                Some(x) => {
                    let at: i32 = coeffs.iter().map(|&(j, a)| a as i32 * x[j]).sum();
                    let slack = rng.random_range(0..=3);
                    match rel {
                        Relation::Le => at + slack,
                        Relation::Ge => at - slack,
                        Relation::Eq => at,
                    }
                }
                None => rng.random_range(-8..=8),
            };
            lp.add(coeffs, rel, rhs as f64);
        }
        let bound_share = if planted.is_some() { 0.6 } else { 0.3 };
        for j in 0..n {
            if rng.random_bool(bound_share) {
                let floor = planted.as_ref().map_or(1, |x| x[j].max(1));
                lp.upper[j] = rng.random_range(floor..=6) as f64;
            }
        }
        let sol = solve_lp(&lp).map_err(|e| format!("#{k}: {e}"))?;
        match brute_force_lp(&lp) {
            BruteLp::Optimal(v) => {
                ensure(sol.status == LpStatus::Optimal, || format!("#{k}: {:?}, expected optimal {v}", sol.status))?;
                let err = (sol.objective - v).abs();
                worst = worst.max(err);
                ensure(err <= LP_TOL, || format!("#{k}: objective error {err:e}"))?;
                optimal += 1;
            }
            BruteLp::Infeasible => {
                ensure(sol.status == LpStatus::Infeasible, || format!("#{k}: {:?}, expected infeasible", sol.status))?;
                infeasible += 1;
            }
            BruteLp::Unbounded => {
                ensure(sol.status == LpStatus::Unbounded, || format!("#{k}: {:?}, expected unbounded", sol.status))?;
                unbounded += 1;
            }
        }
    }
    Ok(format!("{optimal} optimal (max error {worst:.1e}), {infeasible} infeasible, {unbounded} unbounded"))
}

fn scalability() -> Outcome {
    let game = tclass(20, vec![10], false, None, 0);
    let start = Instant::now();
    let params = MilpParams { time_limit: Some(SCALE_LIMIT), ..MilpParams::default() };
    let sol = solve_milp(&build_milp(&game).unwrap(), &params).map_err(|e| e.to_string())?;
    let solve_time = start.elapsed();
    ensure(sol.status == MilpStatus::Optimal, || format!("status {:?} after {solve_time:?}", sol.status))?;

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let inst = dir.path().join("grid");
    let scg = |args: &[&str]| -> Result<(), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_scg")).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("scg {args:?}: {}", String::from_utf8_lossy(&out.stderr)))
    };
    let inst_dir = inst.to_str().unwrap();
    scg(&["gen", "tclass", "--r", "4", "--nt", "2", "--count", "4", "--out-dir", inst_dir])?;
    scg(&["gen", "tclass", "--r", "4", "--T", "2", "--nt", "2", "--count", "2", "--out-dir", inst_dir])?;
    scg(&["gen", "scg", "--r", "4", "--n", "3", "--action-size", "2", "--count", "2", "--out-dir", inst_dir])?;
    scg(&["gen", "tclass", "--r", "20", "--nt", "10", "--count", "2", "--out-dir", inst_dir])?;
    let csv_path = dir.path().join("bench.csv");
    let args = ["bench", inst_dir, "--solvers", "dp,milp", "--time-limit", "1", "--out", csv_path.to_str().unwrap()];
    scg(&args)?;

    let mut reader = csv::Reader::from_path(&csv_path).map_err(|e| e.to_string())?;
    let (mut rows, mut timeouts) = (0, 0);
    for rec in reader.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows += 1;
        ensure(&rec[6] != "Error", || format!("error row for {}", &rec[0]))?;
        if &rec[6] == "Timeout" {
            let ub: f64 = rec[7].parse().map_err(|_| format!("{}: no incumbent", &rec[0]))?;
            let lb: f64 = rec[8].parse().map_err(|_| format!("{}: no bound", &rec[0]))?;
            let gap: f64 = rec[9].parse().map_err(|_| format!("{}: no gap", &rec[0]))?;
            ensure(gap > 0.0 && (gap - (ub - lb) / ub).abs() <= 1e-12, || {
                format!("{}: gap {gap} vs ({ub}-{lb})/{ub}", &rec[0])
            })?;
            timeouts += 1;
        }
    }
    ensure(rows == 20, || format!("{rows} rows, expected 20"))?;
    ensure(timeouts > 0, || "no Timeout row to check the gap formula on".into())?;
    let _ = fs::remove_dir_all(dir.path());
    Ok(format!(
        "r=20 n_1=10 optimal in {:.1}s ({} nodes); bench CSV 10 instances x 2 solvers, {timeouts} Timeout rows with gap (UB-LB)/UB",
        solve_time.as_secs_f64(),
        sol.nodes
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("DP equals pure-leader oracle", dp_matches_pure_oracle),
        ("MILP (T-class) equals mixed-leader oracle", || milp_matches_mixed_oracle(tclass_milp_games())),
        ("MILP (general) equals mixed-leader oracle", || milp_matches_mixed_oracle(general_milp_games())),
        ("3SAT reduction soundness", three_sat_soundness),
        ("K-PARTITION reduction, if-direction", kpartition_if_direction),
        ("best-response dynamics soundness", brd_soundness),
        ("MILP feasibility", milp_feasibility),
        ("LP solver against vertex enumeration", lp_correctness),
        ("scalability smoke and bench CSV", scalability),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("acceptance {} PASS  {name}: {detail} [{secs:.1}s]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("acceptance {} FAIL  {name}: {detail} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
