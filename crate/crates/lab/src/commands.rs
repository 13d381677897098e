//! Implementations of the `boxnet` subcommands, callable from tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use boxnet_core::evolution::{run_evolution_with, EvolutionConfig};
use boxnet_core::oracle::{minimax_oracle, DEFAULT_BOUND};
use boxnet_core::players::level0_choose;
use boxnet_core::rng::{derive_seed, Domain};
use boxnet_core::supervised::{generate_training_set, mean_loss, train_backprop};
use boxnet_core::tournament::{evaluate_snapshots, evaluate_winrate};
use boxnet_core::{
    BoardGeometry, BoardState, CurvePoint, EdgeIndex, EvalRecord, Level0, Level1, Level2, Network,
    NetworkPlayer, Player, RngStream, Snapshot, TrainerConfig,
};

use crate::config::{evolution_config_text, take_evolution_config, take_trainer_config, KeyValues};
use crate::error::{LabError, Result};
use crate::formats;
use crate::parallel::{with_workers, Rayon};
use crate::report;

/// Flags every subcommand accepts.
#[derive(Debug, Clone, Default)]
pub struct Common {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub config: Option<PathBuf>,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl Common {
    fn key_values(&self) -> Result<KeyValues> {
        match &self.config {
            Some(p) => KeyValues::load(p),
            None => Ok(KeyValues::default()),
        }
    }
}

/// Resolves a player selector: `level0`, `level1`, `level2`, `level1net`
/// (the hand-built box-completion network) or `net:<file>`.
pub fn player_from_selector(sel: &str) -> Result<Box<dyn Player>> {
    Ok(match sel {
        "level0" => Box::new(Level0),
        "level1" => Box::new(Level1),
        "level2" => Box::new(Level2),
        "level1net" => Box::new(NetworkPlayer::new(Network::level1(), "level1net")),
        _ => match sel.strip_prefix("net:") {
            Some(path) => Box::new(NetworkPlayer::new(
                formats::load_network(Path::new(path))?,
                sel,
            )),
            None => return Err(LabError::Config(format!("unknown player {sel:?}"))),
        },
    })
}

fn open_output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| LabError::io(p, e))?),
        None => Box::new(std::io::stdout()),
    })
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))
}

pub const DEFAULT_LADDER: [(&str, &str); 5] = [
    ("level1", "level0"),
    ("level2", "level0"),
    ("level2", "level1"),
    ("level0", "level0"),
    ("level1net", "level0"),
];

/// Heuristic tournaments. Without explicit players, runs the standard ladder.
pub fn simulate(
    common: &Common,
    a: Option<&str>,
    b: Option<&str>,
    games: Option<usize>,
) -> Result<Vec<EvalRecord>> {
    let mut kv = common.key_values()?;
    let cfg_games: Option<usize> = kv.take("games")?;
    kv.finish()?;
    let games = games.or(cfg_games).unwrap_or(20_000);
    let pairs: Vec<(String, String)> = match (a, b) {
        (Some(a), Some(b)) => vec![(a.into(), b.into())],
        (None, None) => DEFAULT_LADDER
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        _ => return Err(LabError::Config("give both --a and --b, or neither".into())),
    };
    let seed = common.seed.unwrap_or(0);
    let records = with_workers(common.workers, || -> Result<Vec<EvalRecord>> {
        pairs
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let (pa, pb) = (player_from_selector(a)?, player_from_selector(b)?);
                let pair_seed = derive_seed(seed, Domain::Tournament, &[i as u64]);
                Ok(evaluate_winrate(
                    pa.as_ref(),
                    pb.as_ref(),
                    games,
                    pair_seed,
                    &Rayon,
                )?)
            })
            .collect()
    })??;
    report::write_eval_csv(open_output(common.out.as_deref())?, &records)?;
    Ok(records)
}

pub fn load_evolution_config(common: &Common) -> Result<EvolutionConfig> {
    let mut kv = common.key_values()?;
    let mut cfg = take_evolution_config(&mut kv)?;
    kv.finish()?;
    if let Some(s) = common.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs an evolution, writing each snapshot into the output directory as it
/// is taken and then passing it to `progress`. Returns the snapshot paths.
pub fn evolve(common: &Common, mut progress: impl FnMut(&Snapshot) + Send) -> Result<Vec<PathBuf>> {
    let cfg = load_evolution_config(common)?;
    let dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("snapshots"));
    create_dir(&dir)?;
    formats::write_text(&dir.join("config.txt"), &evolution_config_text(&cfg))?;
    let mut written = Vec::new();
    with_workers(common.workers, || {
        run_evolution_with(&cfg, &Rayon, |snap| {
            let path = dir.join(formats::snapshot_file_name(snap.generation));
            formats::write_text(&path, &formats::snapshot_to_text(&snap))
                .map_err(|e| boxnet_core::Error::Config(e.to_string()))?;
            progress(&snap);
            written.push(path);
            Ok(())
        })
    })??;
    Ok(written)
}

/// Expands directories into the snapshot files they contain.
pub fn collect_snapshot_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| LabError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    f.file_name()
                        .and_then(|n| n.to_str())
                        .is_some_and(|n| n.starts_with("snapshot_") && n.ends_with(".txt"))
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

/// Evaluates every member of every snapshot against a benchmark and writes
/// the best-member curve.
pub fn evaluate(
    common: &Common,
    opponent: Option<&str>,
    games_per_member: Option<usize>,
    inputs: &[PathBuf],
) -> Result<Vec<CurvePoint>> {
    let mut kv = common.key_values()?;
    let cfg_opp: Option<String> = kv.take("opponent")?;
    let cfg_games: Option<usize> = kv.take("games_per_member")?;
    kv.finish()?;
    let opponent = opponent
        .map(str::to_string)
        .or(cfg_opp)
        .unwrap_or_else(|| "level0".into());
    let games = games_per_member.or(cfg_games).unwrap_or(300);
    let opp = player_from_selector(&opponent)?;
    let mut snaps: Vec<Snapshot> = collect_snapshot_paths(inputs)?
        .iter()
        .map(|p| formats::load_snapshot(p))
        .collect::<Result<_>>()?;
    snaps.sort_by_key(|s| (s.variant.to_string(), s.seed, s.generation));
    let seed = common.seed.unwrap_or(0);
    let curve = with_workers(common.workers, || {
        evaluate_snapshots(&snaps, opp.as_ref(), games, seed, &Rayon)
    })??;
    report::write_curve_csv(open_output(common.out.as_deref())?, &curve)?;
    Ok(curve)
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub config: TrainerConfig,
    pub examples: usize,
    pub loss_before: f64,
    pub loss_after: f64,
    pub records: Vec<EvalRecord>,
}

/// Generates a training set, trains a fresh network by back-propagation and
/// evaluates both the untrained and trained networks against levels 0 and 1.
pub fn train(common: &Common, games: usize, eval_games: usize) -> Result<TrainOutcome> {
    let mut kv = common.key_values()?;
    let mut cfg = take_trainer_config(&mut kv)?;
    kv.finish()?;
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let dir = common
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("training"));
    create_dir(&dir)?;
    with_workers(common.workers, || -> Result<TrainOutcome> {
        let data = generate_training_set(games, cfg.seed, &Rayon)?;
        formats::write_text(
            &dir.join("training_set.txt"),
            &formats::training_set_to_text(&data),
        )?;
        let initial = cfg.initial_network();
        let trained = train_backprop(&initial, &data, &cfg)?;
        formats::write_text(
            &dir.join("initial.net"),
            &formats::network_to_text(&initial),
        )?;
        formats::write_text(
            &dir.join("trained.net"),
            &formats::network_to_text(&trained),
        )?;
        let mut records = Vec::new();
        for (label, net) in [("untrained", &initial), ("trained", &trained)] {
            let player = NetworkPlayer::new(net.clone(), label);
            for (i, opp) in [&Level0 as &dyn Player, &Level1].into_iter().enumerate() {
                let s = derive_seed(cfg.seed, Domain::Evaluate, &[i as u64]);
                records.push(evaluate_winrate(&player, opp, eval_games, s, &Rayon)?);
            }
        }
        let file = dir.join("evaluation.csv");
        report::write_eval_csv(
            std::fs::File::create(&file).map_err(|e| LabError::io(&file, e))?,
            &records,
        )?;
        Ok(TrainOutcome {
            examples: data.len(),
            loss_before: mean_loss(&initial, &data, cfg.target_scale),
            loss_after: mean_loss(&trained, &data, cfg.target_scale),
            config: cfg.clone(),
            records,
        })
    })?
}

#[derive(Debug, Clone)]
pub struct OracleQuery {
    pub rows: usize,
    pub cols: usize,
    /// Comma-separated occupied edges; empty for the empty board.
    pub edges: Option<String>,
    /// Number of random positions to generate instead of `edges`.
    pub random: Option<usize>,
    /// Edges left open in random positions.
    pub remaining: usize,
}

/// Exact minimax values for small positions. Each output line is
/// `<occupied edges> value=<v>`.
pub fn oracle(common: &Common, q: &OracleQuery) -> Result<Vec<(Vec<EdgeIndex>, i32)>> {
    let mut kv = common.key_values()?;
    let bound: usize = kv.take("bound")?.unwrap_or(DEFAULT_BOUND);
    kv.finish()?;
    let g = BoardGeometry::new(q.rows, q.cols)?;
    let mut positions = Vec::new();
    match q.random {
        Some(n) => {
            if q.remaining > g.edge_count() {
                return Err(LabError::Config(format!(
                    "remaining {} exceeds {} edges",
                    q.remaining,
                    g.edge_count()
                )));
            }
            let mut rng = RngStream::derived(common.seed.unwrap_or(0), Domain::Tournament, &[]);
            for _ in 0..n {
                let mut s = BoardState::empty(g);
                while s.remaining_moves() > q.remaining {
                    let e = level0_choose(&s, &mut rng);
                    s.play(e)?;
                }
                positions.push(s);
            }
        }
        None => {
            let mut s = BoardState::empty(g);
            for tok in q
                .edges
                .as_deref()
                .unwrap_or("")
                .split(',')
                .filter(|t| !t.trim().is_empty())
            {
                let i: u8 = tok
                    .trim()
                    .parse()
                    .map_err(|_| LabError::Config(format!("bad edge {tok:?}")))?;
                s.play(EdgeIndex(i))?;
            }
            positions.push(s);
        }
    }
    let mut out = open_output(common.out.as_deref())?;
    let mut results = Vec::new();
    for s in positions {
        let v = minimax_oracle(&s, bound)?;
        let occupied: Vec<EdgeIndex> = g.edges().filter(|&e| s.is_occupied(e)).collect();
        let list: Vec<String> = occupied.iter().map(|e| e.to_string()).collect();
        writeln!(
            out,
            "{} value={v}",
            if list.is_empty() {
                "-".into()
            } else {
                list.join(",")
            }
        )
        .map_err(|e| LabError::io(common.out.clone().unwrap_or_default(), e))?;
        results.push((occupied, v));
    }
    Ok(results)
}
