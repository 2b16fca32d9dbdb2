use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use scg_core::{load_game, Game};
use serde::Serialize;

use crate::solve::{applicable, run, SolveParams, Solver};

#[derive(Debug, Serialize)]
pub struct Row {
    pub instance: String,
    pub kind: String,
    pub r: Option<usize>,
    pub n: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub solver: String,
    pub status: String,
    pub objective: Option<f64>,
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    pub time_ms: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Serialize)]
pub struct SummaryRow {
    pub kind: String,
    pub r: Option<usize>,
    pub n: Option<usize>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub solver: String,
    pub runs: usize,
    pub mean_time_ms: f64,
    pub solved_pct: f64,
    pub mean_gap: Option<f64>,
}

fn row(name: &str, game: &Game, solver: Solver) -> Row {
    Row {
        instance: name.into(),
        kind: game.kind().as_str().into(),
        r: Some(game.resources),
        n: Some(game.player_count()),
        t: game.classes().map(<[_]>::len),
        solver: solver.name().into(),
        status: String::new(),
        objective: None,
        lower_bound: None,
        gap: None,
        time_ms: None,
        seed: game.metadata.as_ref().and_then(|m| m.get("seed")).and_then(|s| s.as_u64()),
    }
}

/// Solves every `*.json` instance in `dir` (sorted by name) with each solver.
/// Unreadable instances and failing runs become rows with status `Error`,
/// solvers that do not apply to an instance rows with status `Inapplicable`.
pub fn bench_rows(dir: &Path, solvers: &[Solver], params: &SolveParams) -> Result<Vec<Row>> {
    let mut paths: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut rows = Vec::new();
    for path in paths {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        let game = match fs::read_to_string(&path).map_err(anyhow::Error::from).and_then(|t| Ok(load_game(&t)?)) {
            Ok(g) => g,
            Err(e) => {
                eprintln!("warning: skipping {name}: {e}");
                for &solver in solvers {
                    rows.push(Row {
                        instance: name.clone(),
                        kind: String::new(),
                        r: None,
                        n: None,
                        t: None,
                        solver: solver.name().into(),
                        status: "Error".into(),
                        objective: None,
                        lower_bound: None,
                        gap: None,
                        time_ms: None,
                        seed: None,
                    });
                }
                continue;
            }
        };
        for &solver in solvers {
            let mut out = row(&name, &game, solver);
            if applicable(solver, &game).is_err() {
                out.status = "Inapplicable".into();
            } else {
                match run(&game, solver, params) {
                    Ok(rec) => {
                        out.status = rec.status;
                        out.objective = rec.objective;
                        out.lower_bound = rec.lower_bound;
                        out.gap = rec.gap;
                        out.time_ms = Some(rec.time_ms);
                    }
                    Err(e) => {
                        eprintln!("warning: {} on {name}: {e}", solver.name());
                        out.status = "Error".into();
                    }
                }
            }
            rows.push(out);
        }
    }
    Ok(rows)
}

/// Mean time, share of runs solved to optimality and mean gap per
/// `(kind, r, n, T, solver)`.
pub fn summarize(rows: &[Row]) -> Vec<SummaryRow> {
    type Key = (String, Option<usize>, Option<usize>, Option<usize>, String);
    let mut groups: BTreeMap<Key, Vec<&Row>> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.status != "Inapplicable" && r.status != "Error") {
        groups.entry((r.kind.clone(), r.r, r.n, r.t, r.solver.clone())).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((kind, r, n, t, solver), members)| {
            let runs = members.len();
            let mean_time_ms = members.iter().filter_map(|m| m.time_ms).sum::<f64>() / runs as f64;
            let solved = members.iter().filter(|m| m.status == "Optimal").count();
            let gaps: Vec<f64> = members.iter().filter_map(|m| m.gap).filter(|g| g.is_finite()).collect();
            let mean_gap = (!gaps.is_empty()).then(|| gaps.iter().sum::<f64>() / gaps.len() as f64);
            SummaryRow {
                kind,
                r,
                n,
                t,
                solver,
                runs,
                mean_time_ms,
                solved_pct: 100.0 * solved as f64 / runs as f64,
                mean_gap,
            }
        })
        .collect()
}

pub const ROW_HEADER: [&str; 12] =
    ["instance", "kind", "r", "n", "T", "solver", "status", "objective", "lower_bound", "gap", "time_ms", "seed"];
pub const SUMMARY_HEADER: [&str; 9] =
    ["kind", "r", "n", "T", "solver", "runs", "mean_time_ms", "solved_pct", "mean_gap"];

/// Header first, so an empty table still names its columns.
pub fn write_csv<T: Serialize>(header: &[&str], rows: &[T], out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
