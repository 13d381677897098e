//! Win-rate measurement between players and over population snapshots.

use alloc::string::String;
use alloc::vec::Vec;

use crate::board::{BoardGeometry, BoardState, Side};
use crate::error::{Error, Result};
use crate::evolution::Snapshot;
use crate::exec::Executor;
use crate::genome::Genome;
use crate::players::{play_game, Player};
use crate::rng::{derive_seed, Domain, RngStream};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub subject: String,
    pub opponent: String,
    pub games: u64,
    pub wins: u64,
    pub win_rate: f64,
    /// 95% normal-approximation half-width of `win_rate`.
    pub confidence_halfwidth: f64,
}

impl EvalRecord {
    pub fn new(subject: String, opponent: String, games: u64, wins: u64) -> Self {
        let p = if games == 0 {
            0.0
        } else {
            wins as f64 / games as f64
        };
        let half = if games == 0 {
            0.0
        } else {
            1.96 * libm::sqrt(p * (1.0 - p) / games as f64)
        };
        Self {
            subject,
            opponent,
            games,
            wins,
            win_rate: p,
            confidence_halfwidth: half,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub variant: String,
    pub cumulative_games: u64,
    pub best_win_rate: f64,
}

/// Wins of `a` split by role: `[as first mover, as second mover]`. Game `g`
/// uses the stream `derive_seed(seed, Tournament, [g])`; `a` moves first in
/// even-numbered games.
pub fn role_wins<E: Executor>(
    a: &dyn Player,
    b: &dyn Player,
    n_games: usize,
    seed: u64,
    exec: &E,
) -> Result<[u64; 2]> {
    if n_games == 0 || !n_games.is_multiple_of(2) {
        return Err(Error::OddGameCount(n_games));
    }
    let board = BoardState::empty(BoardGeometry::standard());
    let outcomes = exec.map(n_games, |g| {
        let mut rng = RngStream::derived(seed, Domain::Tournament, &[g as u64]);
        let a_first = g % 2 == 0;
        let end = if a_first {
            play_game(a, b, board, &mut rng)
        } else {
            play_game(b, a, board, &mut rng)
        };
        let a_side = if a_first { Side::P1 } else { Side::P2 };
        (a_first, end.result().winner() == Some(a_side))
    });
    let mut wins = [0u64; 2];
    for (first, won) in outcomes {
        if won {
            wins[if first { 0 } else { 1 }] += 1;
        }
    }
    Ok(wins)
}

pub fn evaluate_winrate<E: Executor>(
    a: &dyn Player,
    b: &dyn Player,
    n_games: usize,
    seed: u64,
    exec: &E,
) -> Result<EvalRecord> {
    let [first, second] = role_wins(a, b, n_games, seed, exec)?;
    Ok(EvalRecord::new(
        a.name(),
        b.name(),
        n_games as u64,
        first + second,
    ))
}

/// Win rate of every member of a population against `opponent`. Members are
/// evaluated concurrently; member `i` uses seed `derive_seed(seed, Evaluate,
/// [tag, i])`.
pub fn member_win_rates<E: Executor>(
    genomes: &[Genome],
    opponent: &dyn Player,
    games_per_member: usize,
    seed: u64,
    tag: u64,
    exec: &E,
) -> Result<Vec<f64>> {
    if games_per_member == 0 || !games_per_member.is_multiple_of(2) {
        return Err(Error::OddGameCount(games_per_member));
    }
    let rates = exec.map(genomes.len(), |i| {
        let net = genomes[i].decode();
        let member_seed = derive_seed(seed, Domain::Evaluate, &[tag, i as u64]);
        let [x, y] = role_wins(
            &net,
            opponent,
            games_per_member,
            member_seed,
            &crate::exec::Serial,
        )
        .expect("game count checked above");
        (x + y) as f64 / games_per_member as f64
    });
    Ok(rates)
}

/// One curve point per snapshot: the best member's win rate against
/// `opponent`, placed at the snapshot's cumulative game count.
pub fn evaluate_snapshots<E: Executor>(
    snapshots: &[Snapshot],
    opponent: &dyn Player,
    games_per_member: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<CurvePoint>> {
    let mut curve = Vec::with_capacity(snapshots.len());
    for (idx, snap) in snapshots.iter().enumerate() {
        let rates = member_win_rates(
            &snap.genomes,
            opponent,
            games_per_member,
            seed,
            idx as u64,
            exec,
        )?;
        let best = rates.iter().copied().fold(0.0, f64::max);
        curve.push(CurvePoint {
            variant: alloc::format!("{}", snap.variant),
            cumulative_games: snap.cumulative_games,
            best_win_rate: best,
        });
    }
    curve.sort_by_key(|p| p.cumulative_games);
    Ok(curve)
}
