//! Benchmark players and the common player contract.

use alloc::string::String;
use alloc::vec::Vec;

use crate::board::{BoardState, EdgeIndex, Side};
use crate::network::Network;
use crate::rng::RngStream;

/// Anything that can pick a legal move. Implementations never return an
/// occupied edge and must only be asked on non-terminal states.
pub trait Player: Sync {
    fn name(&self) -> String;
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex;
}

impl<P: Player + ?Sized> Player for &P {
    fn name(&self) -> String {
        (**self).name()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
        (**self).choose(state, rng)
    }
}

/// Random play.
#[derive(Debug, Default, Clone, Copy)]
pub struct Level0;

/// Box completion: take the move completing the most boxes, else random.
#[derive(Debug, Default, Clone, Copy)]
pub struct Level1;

/// Third-side avoidance on top of box completion.
#[derive(Debug, Default, Clone, Copy)]
pub struct Level2;

pub fn level0_choose(state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
    assert!(!state.is_terminal(), "no move on a finished board");
    let free = state.remaining_moves();
    let k = rng.below(free);
    // k-th set bit of the free mask
    let mut mask = !state.edge_mask() & full_mask(state);
    for _ in 0..k {
        mask &= mask - 1;
    }
    EdgeIndex(mask.trailing_zeros() as u8)
}

fn full_mask(state: &BoardState) -> u128 {
    let n = state.geometry().edge_count();
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

/// Legal moves completing the largest positive number of boxes; empty when
/// no move completes a box.
pub fn best_completing_moves(state: &BoardState) -> Vec<EdgeIndex> {
    let mut best = 0u8;
    let mut out = Vec::new();
    state.for_each_legal(|e| {
        let k = state.completes(e);
        if k > best {
            best = k;
            out.clear();
        }
        if k > 0 && k == best {
            out.push(e);
        }
    });
    out
}

/// Legal moves that complete nothing and hand no box its third side.
pub fn safe_moves(state: &BoardState) -> Vec<EdgeIndex> {
    let mut out = Vec::new();
    state.for_each_legal(|e| {
        if !state.gives_third_side(e) {
            out.push(e);
        }
    });
    out
}

pub fn level1_choose(state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
    assert!(!state.is_terminal(), "no move on a finished board");
    match rng.choose(&best_completing_moves(state)) {
        Some(e) => e,
        None => level0_choose(state, rng),
    }
}

pub fn level2_choose(state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
    assert!(!state.is_terminal(), "no move on a finished board");
    if let Some(e) = rng.choose(&best_completing_moves(state)) {
        return e;
    }
    match rng.choose(&safe_moves(state)) {
        Some(e) => e,
        None => level0_choose(state, rng),
    }
}

impl Player for Level0 {
    fn name(&self) -> String {
        "level0".into()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
        level0_choose(state, rng)
    }
}

impl Player for Level1 {
    fn name(&self) -> String {
        "level1".into()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
        level1_choose(state, rng)
    }
}

impl Player for Level2 {
    fn name(&self) -> String {
        "level2".into()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
        level2_choose(state, rng)
    }
}

/// Heuristic player by level number.
pub fn heuristic(level: u8) -> Option<&'static dyn Player> {
    match level {
        0 => Some(&Level0),
        1 => Some(&Level1),
        2 => Some(&Level2),
        _ => None,
    }
}

/// A network wrapped as a player.
#[derive(Debug, Clone)]
pub struct NetworkPlayer {
    pub network: Network,
    pub label: String,
}

impl NetworkPlayer {
    pub fn new(network: Network, label: impl Into<String>) -> Self {
        Self {
            network,
            label: label.into(),
        }
    }
}

impl Player for NetworkPlayer {
    fn name(&self) -> String {
        self.label.clone()
    }
    fn choose(&self, state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
        self.network
            .choose_move(state, rng)
            .expect("network player asked to move on an invalid board")
    }
}

/// Plays one game from the empty board of `state`'s geometry. `first` moves
/// as P1. Returns the finished board.
pub fn play_game(
    first: &dyn Player,
    second: &dyn Player,
    mut state: BoardState,
    rng: &mut RngStream,
) -> BoardState {
    while !state.is_terminal() {
        let e = match state.to_move() {
            Side::P1 => first.choose(&state, rng),
            Side::P2 => second.choose(&state, rng),
        };
        state.play(e).expect("player returned an illegal move");
    }
    state
}
