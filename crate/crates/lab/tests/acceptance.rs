//! Acceptance suite. Runs every criterion and prints one PASS/FAIL line for
//! each; exits non-zero if any fails. Pass a substring to run a subset,
//! e.g. `cargo test --test acceptance -- genome`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use boxnet_core::evolution::{
    draw_sharing, fitness_ifs_with, run_evolution, share_pool, MatchResult,
};
use boxnet_core::genome::{quant_index, quant_value, GENOME_BYTES, QUANT_MAX};
use boxnet_core::network::PARAM_COUNT;
use boxnet_core::oracle::{minimax_oracle, DEFAULT_BOUND};
use boxnet_core::players::{best_completing_moves, level0_choose};
use boxnet_core::rng::Domain;
use boxnet_core::supervised::{example_loss, generate_training_set, loss_gradient, train_backprop};
use boxnet_core::tournament::{evaluate_winrate, member_win_rates};
use boxnet_core::{
    BoardGeometry, BoardState, EdgeIndex, EvolutionConfig, Genome, Level0, Level1, Level2, Network,
    NetworkPlayer, Player, RngStream, Serial, TrainerConfig, TrainingExample, Variant,
};
use boxnet_lab::commands::{self, Common};
use boxnet_lab::Rayon;

type Outcome = Result<String, String>;
type Check = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if $cond {
        } else {
            return Err(format!($($msg)*));
        }
    };
}

fn heuristic_ladder() -> Outcome {
    let games = 20_000;
    let a = evaluate_winrate(&Level1, &Level0, games, 101, &Rayon).map_err(|e| e.to_string())?;
    let b = evaluate_winrate(&Level2, &Level0, games, 102, &Rayon).map_err(|e| e.to_string())?;
    let c = evaluate_winrate(&Level2, &Level1, games, 103, &Rayon).map_err(|e| e.to_string())?;
    let detail = format!(
        "L1>L0 {:.4}, L2>L0 {:.4}, L2>L1 {:.4} over {games} games each",
        a.win_rate, b.win_rate, c.win_rate
    );
    ensure!(a.win_rate >= 0.99, "{detail}");
    ensure!(b.win_rate >= 0.99, "{detail}");
    ensure!((c.win_rate - 0.8383).abs() <= 0.03, "{detail}");
    Ok(detail)
}

fn level1_network() -> Outcome {
    let player = NetworkPlayer::new(Network::level1(), "level1net");
    let mut rng = RngStream::from_seed(202);
    let (mut positions, mut violations) = (0, 0);
    for _ in 0..1000 {
        let mut s = BoardState::empty(BoardGeometry::standard());
        while !s.is_terminal() {
            let chosen = player.choose(&s, &mut rng);
            let completes = s.boxes_completed_by(chosen).map_err(|e| e.to_string())? > 0;
            if completes == best_completing_moves(&s).is_empty() {
                violations += 1;
            }
            positions += 1;
            let e = level0_choose(&s, &mut rng);
            s.play(e).map_err(|e| e.to_string())?;
        }
    }
    let r = evaluate_winrate(&player, &Level0, 20_000, 203, &Rayon).map_err(|e| e.to_string())?;
    let detail = format!(
        "{violations} violations in {positions} positions, {:.4} vs level 0 over 20000 games",
        r.win_rate
    );
    ensure!(violations == 0 && r.win_rate >= 0.99, "{detail}");
    Ok(detail)
}

fn genome_exactness() -> Outcome {
    ensure!(
        GENOME_BYTES == 582 && Genome::zeros().as_bytes().len() == 582,
        "genome length"
    );
    let (lo, hi) = (quant_value(0).unwrap(), quant_value(QUANT_MAX).unwrap());
    ensure!(lo == -64.0 && hi == 64.0, "endpoints {lo} {hi}");
    let mut rng = RngStream::from_seed(303);
    for i in 0..1000 {
        let mut g = Genome::random(&mut rng);
        g.clear_unused();
        ensure!(
            Genome::encode(&g.decode()).unwrap() == g,
            "round trip failed on genome {i}"
        );
    }
    let mut worst: f64 = 0.0;
    for _ in 0..200_000 {
        let v = -64.0 + 128.0 * rng.unit();
        worst = worst.max((quant_value(quant_index(v).unwrap()).unwrap() - v).abs());
    }
    ensure!(worst <= 64.0 / 1023.0, "max quantization error {worst}");
    Ok(format!(
        "582 bytes, endpoints exact, 1000 round trips, max error {worst:.6}"
    ))
}

fn games_accounting() -> Outcome {
    let mut seen = Vec::new();
    for (variant, per) in [
        (Variant::Direct { opponent: 0 }, 2000u64),
        (Variant::RoundRobin, 9900),
        (Variant::ImplicitFitnessSharing, 1650),
    ] {
        let cfg = EvolutionConfig {
            variant,
            population_size: 100,
            generations: 3,
            snapshot_interval: 1,
            ..Default::default()
        };
        let snaps = run_evolution(&cfg, &Rayon).map_err(|e| e.to_string())?;
        let counts: Vec<u64> = snaps.iter().map(|s| s.cumulative_games).collect();
        ensure!(
            counts == [0, per, 2 * per],
            "{variant}: cumulative {counts:?}, expected step {per}"
        );
        seen.push(format!("{variant}={}", counts[1]));
    }
    Ok(seen.join(", "))
}

fn ifs_arithmetic() -> Outcome {
    let outcomes = [
        (0, MatchResult::from_wins(2, 0)),
        (1, MatchResult::from_wins(1, 1)),
    ];
    let split = share_pool(&outcomes, 33.0, 4, 1);
    ensure!(split == [(0, 26.4), (1, 6.6)], "share_pool gave {split:?}");
    // same scenario through a full sharing round
    let base = EvolutionConfig {
        population_size: 4,
        variant: Variant::ImplicitFitnessSharing,
        ifs_antigen_fraction: 0.25,
        ifs_antibody_fraction: 0.5,
        ..Default::default()
    };
    for seed in 0..100 {
        let cfg = EvolutionConfig {
            master_seed: seed,
            ..base.clone()
        };
        let draw = draw_sharing(
            4,
            1,
            2,
            &mut RngStream::derived(seed, Domain::Sampling, &[0]),
        );
        let sweeper = draw.antibodies[0][0];
        let fv = fitness_ifs_with(4, &cfg, 0, &Serial, |ab, _, _| {
            if ab == sweeper {
                MatchResult::from_wins(2, 0)
            } else {
                MatchResult::from_wins(1, 1)
            }
        });
        let other = draw.antibodies[0][1];
        let got = (
            fv.raw[sweeper] - cfg.fitness_floor,
            fv.raw[other] - cfg.fitness_floor,
        );
        ensure!(
            fv.raw[sweeper] == 26.4 + cfg.fitness_floor && fv.raw[other] == 6.6 + cfg.fitness_floor,
            "seed {seed}: {got:?}"
        );
    }
    Ok("26.4 and 6.6 from a 33-point pool".into())
}

fn random_example(rng: &mut RngStream) -> TrainingExample {
    loop {
        let mut s = BoardState::empty(BoardGeometry::standard());
        for _ in 0..rng.below(23) {
            let e = level0_choose(&s, rng);
            s.play(e).unwrap();
        }
        let ex = TrainingExample::from_state(&s).unwrap();
        if ex.is_informative() {
            return ex;
        }
    }
}

fn gradient_check() -> Outcome {
    let mut rng = RngStream::from_seed(606);
    let (h, ts) = (1e-4, 0.5);
    let mut worst: f64 = 0.0;
    for pair in 0..20 {
        let params: Vec<f64> = (0..PARAM_COUNT).map(|_| 2.0 * rng.unit() - 1.0).collect();
        let net = Network::from_params(&params).unwrap();
        let ex = random_example(&mut rng);
        let analytic = loss_gradient(&net, &ex, ts).1.params();
        for (i, &g) in analytic.iter().enumerate() {
            let mut p = params.clone();
            p[i] += h;
            let up = example_loss(&Network::from_params(&p).unwrap(), &ex, ts);
            p[i] -= 2.0 * h;
            let down = example_loss(&Network::from_params(&p).unwrap(), &ex, ts);
            let numeric = (up - down) / (2.0 * h);
            let scale = g.abs().max(numeric.abs());
            if scale < 1e-7 {
                ensure!(
                    (g - numeric).abs() < 1e-9,
                    "pair {pair} param {i}: {g} vs {numeric}"
                );
                continue;
            }
            let rel = (g - numeric).abs() / scale;
            worst = worst.max(rel);
            ensure!(rel <= 1e-4, "pair {pair} param {i}: relative error {rel}");
        }
    }
    Ok(format!("20 pairs, worst relative error {worst:.2e}"))
}

/// Rules rewritten from scratch for cross-checking the engine.
#[derive(Clone)]
struct Referee {
    rows: usize,
    cols: usize,
    drawn: Vec<bool>,
    score: [i32; 2],
    mover: usize,
}

impl Referee {
    fn new(rows: usize, cols: usize) -> Self {
        let n = (rows + 1) * cols + rows * (cols + 1);
        Self {
            rows,
            cols,
            drawn: vec![false; n],
            score: [0, 0],
            mover: 0,
        }
    }

    fn full_boxes(&self) -> i32 {
        let vbase = (self.rows + 1) * self.cols;
        let mut n = 0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let sides = [
                    r * self.cols + c,
                    (r + 1) * self.cols + c,
                    vbase + r * (self.cols + 1) + c,
                    vbase + r * (self.cols + 1) + c + 1,
                ];
                n += sides.iter().all(|&e| self.drawn[e]) as i32;
            }
        }
        n
    }

    fn play(&mut self, e: usize) -> i32 {
        let before = self.full_boxes();
        self.drawn[e] = true;
        let gained = self.full_boxes() - before;
        self.score[self.mover] += gained;
        if gained == 0 {
            self.mover ^= 1;
        }
        gained
    }
}

struct TreeStats {
    leaves: usize,
    mismatches: usize,
}

fn walk(engine: &BoardState, referee: &Referee, stats: &mut TreeStats) -> i32 {
    let free: Vec<usize> = (0..referee.drawn.len())
        .filter(|&e| !referee.drawn[e])
        .collect();
    let scores = engine.scores();
    if scores[0] as i32 != referee.score[0] || scores[1] as i32 != referee.score[1] {
        stats.mismatches += 1;
    }
    if free.is_empty() {
        stats.leaves += 1;
        if !engine.is_terminal() {
            stats.mismatches += 1;
        }
        return 0;
    }
    let mut best = i32::MIN;
    for e in free {
        let mut r = referee.clone();
        let gained = r.play(e);
        let (next, _) = engine.apply_move(EdgeIndex(e as u8)).expect("legal");
        let child = walk(&next, &r, stats);
        best = best.max(if r.mover == referee.mover {
            gained + child
        } else {
            -child
        });
    }
    if minimax_oracle(engine, DEFAULT_BOUND) != Ok(best) {
        stats.mismatches += 1;
    }
    best
}

fn engine_vs_oracle() -> Outcome {
    let mut parts = Vec::new();
    for (rows, cols, leaves) in [(1, 1, 24), (1, 2, 5040)] {
        let mut stats = TreeStats {
            leaves: 0,
            mismatches: 0,
        };
        walk(
            &BoardState::new(rows, cols).unwrap(),
            &Referee::new(rows, cols),
            &mut stats,
        );
        ensure!(
            stats.leaves == leaves,
            "{rows}x{cols}: {} leaves",
            stats.leaves
        );
        ensure!(
            stats.mismatches == 0,
            "{rows}x{cols}: {} mismatches",
            stats.mismatches
        );
        parts.push(format!("{rows}x{cols} {leaves} terminal lines agree"));
    }
    let v = minimax_oracle(&BoardState::new(1, 1).unwrap(), DEFAULT_BOUND)
        .map_err(|e| e.to_string())?;
    ensure!(v == -1, "oracle(empty 1x1) = {v}");
    parts.push("oracle(empty 1x1) = -1".into());
    Ok(parts.join(", "))
}

const BUDGET: u64 = 300_000;
const EVAL_GAMES: usize = 300;

/// Best snapshot win rate against level 0 for one evolution run, plus a
/// fresh re-measurement of that member.
fn best_within_budget(variant: Variant, seed: u64) -> Result<(f64, u64, f64), String> {
    let probe = EvolutionConfig {
        variant,
        ..Default::default()
    };
    let generations = (BUDGET / probe.games_per_generation()) as usize + 1;
    let cfg = EvolutionConfig {
        variant,
        mutation_prob: 0.00072,
        generations,
        snapshot_interval: 20,
        master_seed: seed,
        ..Default::default()
    };
    let snaps = run_evolution(&cfg, &Rayon).map_err(|e| e.to_string())?;
    let (mut best, mut at, mut member) = (0.0, 0, None);
    for (i, s) in snaps.iter().enumerate() {
        if s.cumulative_games > BUDGET {
            continue;
        }
        let rates = member_win_rates(&s.genomes, &Level0, EVAL_GAMES, 7, i as u64, &Rayon)
            .map_err(|e| e.to_string())?;
        for (m, &r) in rates.iter().enumerate() {
            if r > best {
                (best, at, member) = (r, s.cumulative_games, Some(s.genomes[m].decode()));
            }
        }
    }
    let net = member.ok_or("no snapshot within budget")?;
    let again =
        evaluate_winrate(&net, &Level0, 1000, 808 + seed, &Rayon).map_err(|e| e.to_string())?;
    Ok((best, at, again.win_rate))
}

fn evolution_trend() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for variant in [
        Variant::Direct { opponent: 0 },
        Variant::ImplicitFitnessSharing,
    ] {
        let mut hits = 0;
        let mut per_seed = Vec::new();
        for seed in 0..3 {
            let (best, at, again) = best_within_budget(variant, seed)?;
            hits += (best >= 0.80) as usize;
            per_seed.push(format!("{best:.3}@{at} (recheck {again:.3})"));
        }
        ok &= hits >= 2;
        lines.push(format!(
            "{variant}: {hits}/3 seeds [{}]",
            per_seed.join(", ")
        ));
    }
    let detail = lines.join("; ");
    ensure!(ok, "{detail}");
    Ok(detail)
}

fn supervised_trend() -> Outcome {
    let (mut untrained, mut trained) = (0.0, 0.0);
    let mut sizes = Vec::new();
    for seed in 0..5u64 {
        let data = generate_training_set(800, seed, &Rayon).map_err(|e| e.to_string())?;
        ensure!(
            (5437.5..=9062.5).contains(&(data.len() as f64)),
            "seed {seed}: {} retained examples",
            data.len()
        );
        sizes.push(data.len());
        let cfg = TrainerConfig {
            seed,
            ..Default::default()
        };
        let start = cfg.initial_network();
        let end = train_backprop(&start, &data, &cfg).map_err(|e| e.to_string())?;
        let eval_seed = 909 + seed;
        untrained += evaluate_winrate(&start, &Level0, EVAL_GAMES, eval_seed, &Rayon)
            .map_err(|e| e.to_string())?
            .win_rate;
        trained += evaluate_winrate(&end, &Level0, EVAL_GAMES, eval_seed, &Rayon)
            .map_err(|e| e.to_string())?
            .win_rate;
    }
    let detail = format!(
        "retained {sizes:?}, mean win rate vs level 0 untrained {:.3}, trained {:.3}",
        untrained / 5.0,
        trained / 5.0
    );
    ensure!(trained > untrained, "{detail}");
    Ok(detail)
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("evolve.cfg");
    let mut checked = Vec::new();
    for variant in ["direct:1", "ifs", "roundrobin"] {
        std::fs::write(
            &config,
            format!("population_size=16\ngenerations=5\nsnapshot_interval=2\nvariant={variant}\n"),
        )
        .map_err(|e| e.to_string())?;
        let mut runs = Vec::new();
        for (k, workers) in [1usize, 4, 4].into_iter().enumerate() {
            let snaps = tmp.path().join(format!("{variant}-{k}"));
            let common = Common {
                seed: Some(42),
                out: Some(snaps.clone()),
                config: Some(config.clone()),
                workers,
            };
            commands::evolve(&common, |_| ()).map_err(|e| e.to_string())?;
            let csv = tmp.path().join(format!("{variant}-{k}.csv"));
            let eval = Common {
                out: Some(csv.clone()),
                config: None,
                ..common
            };
            commands::evaluate(
                &eval,
                Some("level1"),
                Some(20),
                std::slice::from_ref(&snaps),
            )
            .map_err(|e| e.to_string())?;
            runs.push((
                dir_bytes(&snaps),
                std::fs::read(&csv).map_err(|e| e.to_string())?,
            ));
        }
        ensure!(
            runs[0].0 == runs[1].0 && runs[1].0 == runs[2].0,
            "{variant}: snapshots differ"
        );
        ensure!(
            runs[0].1 == runs[1].1 && runs[1].1 == runs[2].1,
            "{variant}: CSV differs"
        );
        checked.push(format!("{variant} ({} files)", runs[0].0.len()));
    }
    Ok(format!(
        "identical with 1 and 4 workers: {}",
        checked.join(", ")
    ))
}

fn main() {
    let criteria: [(&str, Check); 10] = [
        ("heuristic ladder", heuristic_ladder),
        ("constructed level-1 network", level1_network),
        ("genome exactness", genome_exactness),
        ("games-per-generation accounting", games_accounting),
        ("IFS arithmetic", ifs_arithmetic),
        ("gradient check", gradient_check),
        ("engine vs oracle", engine_vs_oracle),
        ("evolution trend", evolution_trend),
        ("supervised baseline trend", supervised_trend),
        ("determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (n, (name, check)) in criteria.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome =
            catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1}s]", n + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", n + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
