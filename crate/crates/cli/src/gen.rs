use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Subcommand};
use scg_core::format::parse_rational;
use scg_core::generators::{
    gen_random_3sat, gen_random_kpartition, gen_random_scg, gen_random_tclass, reduce_3sat, reduce_kpartition,
    size_epsilon, ScgParams, TclassParams,
};
use scg_core::{save_game, Game};
use serde_json::{json, Value};

#[derive(Debug, Args)]
pub struct Batch {
    /// Number of instances; seeds run from --seed upwards.
    #[arg(long, default_value_t = 1)]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum GenCommand {
    /// Random T-class singleton game.
    Tclass {
        #[arg(long)]
        r: usize,
        /// Number of classes.
        #[arg(long = "T", default_value_t = 1)]
        t: usize,
        /// Followers per class.
        #[arg(long)]
        nt: usize,
        #[arg(long)]
        monotone: bool,
        /// Costs are drawn from 1..=cost-max (default n·r·T).
        #[arg(long)]
        cost_max: Option<u64>,
        #[command(flatten)]
        batch: Batch,
    },
    /// Random general congestion game.
    Scg {
        #[arg(long)]
        r: usize,
        /// Players including the leader.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        action_size: usize,
        /// Actions per player (default r/2).
        #[arg(long)]
        actions: Option<usize>,
        #[arg(long)]
        monotone: bool,
        #[arg(long)]
        cost_max: Option<u64>,
        #[command(flatten)]
        batch: Batch,
    },
    /// Game built from a random 3SAT formula.
    #[command(name = "3sat-hard")]
    ThreeSat {
        #[arg(long)]
        vars: usize,
        #[arg(long, default_value_t = 4.26)]
        ratio: f64,
        /// Cost of the leader's escape resource, as "p/q".
        #[arg(long, default_value = "1/4", conflicts_with = "size_epsilon")]
        epsilon: String,
        /// Use 2^-I, I being the instance size, as epsilon.
        #[arg(long)]
        size_epsilon: bool,
        #[command(flatten)]
        batch: Batch,
    },
    /// Game built from a random K-PARTITION instance.
    #[command(name = "kpart-hard")]
    KPart {
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        batch: Batch,
    },
}

fn with_seed(mut game: Game, generator: &str, seed: u64, extra: Value) -> Game {
    let mut meta = game.metadata.take().unwrap_or_else(|| json!({}));
    if let Value::Object(map) = &mut meta {
        map.insert("generator".into(), json!(generator));
        map.insert("seed".into(), json!(seed));
        if let Value::Object(more) = extra {
            map.extend(more);
        }
    }
    game.metadata = Some(meta);
    game
}

fn one(cmd: &GenCommand, seed: u64) -> Result<(String, Game)> {
    Ok(match cmd {
        GenCommand::Tclass { r, t, nt, monotone, cost_max, .. } => {
            let params =
                TclassParams { resources: *r, class_sizes: vec![*nt; *t], monotone: *monotone, cost_max: *cost_max };
            (format!("tclass-r{r}-T{t}-nt{nt}"), gen_random_tclass(&params, seed)?)
        }
        GenCommand::Scg { r, n, action_size, actions, monotone, cost_max, .. } => {
            let params = ScgParams {
                resources: *r,
                players: *n,
                action_size: *action_size,
                actions_per_player: *actions,
                monotone: *monotone,
                cost_max: *cost_max,
            };
            (format!("scg-r{r}-n{n}-s{action_size}"), gen_random_scg(&params, seed)?)
        }
        GenCommand::ThreeSat { vars, ratio, epsilon, size_epsilon: sized, .. } => {
            let cnf = gen_random_3sat(*vars, *ratio, seed)?;
            let eps = if *sized {
                size_epsilon(&cnf)?
            } else {
                parse_rational(epsilon).ok_or_else(|| anyhow!("--epsilon: cannot parse {epsilon:?}"))?
            };
            let game = reduce_3sat(&cnf, &eps)?;
            let game = with_seed(game, "3sat-hard", seed, json!({ "ratio": ratio }));
            (format!("3sat-hard-v{vars}-c{}", cnf.clauses.len()), game)
        }
        GenCommand::KPart { size, .. } => {
            let inst = gen_random_kpartition(*size, seed)?;
            let game = with_seed(reduce_kpartition(&inst)?, "kpart-hard", seed, json!({}));
            (format!("kpart-hard-s{size}"), game)
        }
    })
}

fn batch(cmd: &GenCommand) -> &Batch {
    match cmd {
        GenCommand::Tclass { batch, .. }
        | GenCommand::Scg { batch, .. }
        | GenCommand::ThreeSat { batch, .. }
        | GenCommand::KPart { batch, .. } => batch,
    }
}

/// Writes `{generator}-{params}-{seed}.json` files into `dir`.
pub fn generate(cmd: &GenCommand, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let b = batch(cmd);
    (b.seed..b.seed + b.count)
        .map(|seed| {
            let (stem, game) = one(cmd, seed)?;
            let path = dir.join(format!("{stem}-{seed}.json"));
            fs::write(&path, save_game(&game)).with_context(|| format!("writing {}", path.display()))?;
            Ok(path)
        })
        .collect()
}
