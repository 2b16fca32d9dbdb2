mod bench;
mod gen;
mod solve;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use scg_core::equilibrium::DEFAULT_ENUMERATION_CAP;
use scg_core::solution::{verify_record, SolveRecord};
use scg_core::{load_game, Game};

use crate::gen::GenCommand;
use crate::solve::{lp_text, run, SolveParams, Solver};

/// Optimistic Stackelberg equilibria in congestion games.
#[derive(Debug, Parser)]
#[command(name = "scg", version)]
struct Cli {
    /// Directory for generated files.
    #[arg(long, global = true, env = "SCG_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Limits {
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Relative optimality gap at which branch and bound stops.
    #[arg(long, default_value_t = 1e-9)]
    gap_tol: f64,
    /// Most followers' outcomes the oracles may enumerate.
    #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
    cap: u128,
}

impl Limits {
    fn params(&self) -> SolveParams {
        SolveParams { time_limit: self.time_limit.map(Duration::from_secs_f64), gap_tol: self.gap_tol, cap: self.cap }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate instance files.
    Gen {
        #[command(subcommand)]
        kind: GenCommand,
    },
    /// Solve one instance and print its result record.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        solver: Solver,
        #[command(flatten)]
        limits: Limits,
        /// Also write the record (or the LP file for export-lp) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a result record against its instance.
    Verify { instance: PathBuf, result: PathBuf },
    /// Solve every instance of a directory and write a CSV.
    Bench {
        dir: PathBuf,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Solver::Milp])]
        solvers: Vec<Solver>,
        #[command(flatten)]
        limits: Limits,
        /// CSV path (default: bench.csv in the output directory); the
        /// summary goes next to it with a `-summary` suffix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_game(path: &Path) -> Result<Game> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    load_game(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn execute(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { kind } => {
            for path in gen::generate(&kind, &cli.out_dir)? {
                println!("{}", path.display());
            }
        }
        Command::Solve { instance, solver, limits, out } => {
            let game = read_game(&instance)?;
            let text = if solver == Solver::ExportLp {
                lp_text(&game)?
            } else {
                let mut rec = run(&game, solver, &limits.params())?;
                rec.instance = Some(instance.display().to_string());
                rec.to_json() + "\n"
            };
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Verify { instance, result } => {
            let game = read_game(&instance)?;
            let text = fs::read_to_string(&result).with_context(|| format!("reading {}", result.display()))?;
            let record = SolveRecord::from_json(&text).with_context(|| format!("parsing {}", result.display()))?;
            let report = verify_record(&game, &record)?;
            for c in &report.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Bench { dir, solvers, limits, out } => {
            let rows = bench::bench_rows(&dir, &solvers, &limits.params())?;
            let path = out.unwrap_or_else(|| cli.out_dir.join("bench.csv"));
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
            bench::write_csv(&bench::ROW_HEADER, &rows, file)?;
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let summary_path = path.with_file_name(format!("{stem}-summary.csv"));
            let summary = bench::summarize(&rows);
            bench::write_csv(&bench::SUMMARY_HEADER, &summary, fs::File::create(&summary_path)?)?;
            bench::write_csv(&bench::SUMMARY_HEADER, &summary, std::io::stdout())?;
            eprintln!("{} rows written to {}", rows.len(), path.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
