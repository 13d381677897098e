//! Exact negamax over the full rules, for validating the engine on small
//! boards. The mover may decline available boxes, so the search covers
//! double-dealing lines no heuristic player uses.

use alloc::collections::BTreeMap;

use crate::board::BoardState;
use crate::error::{Error, Result};

pub const DEFAULT_BOUND: usize = 12;

/// Optimal (mover's future boxes − opponent's future boxes) from `state`.
pub fn minimax_oracle(state: &BoardState, bound: usize) -> Result<i32> {
    let remaining = state.remaining_moves();
    if remaining > bound {
        return Err(Error::SearchBound { remaining, bound });
    }
    let mut memo = BTreeMap::new();
    Ok(negamax(state, &mut memo))
}

// Future play depends only on which edges are drawn, so the edge mask keys
// the table.
fn negamax(state: &BoardState, memo: &mut BTreeMap<u128, i32>) -> i32 {
    if state.is_terminal() {
        return 0;
    }
    if let Some(&v) = memo.get(&state.edge_mask()) {
        return v;
    }
    let mut best = i32::MIN;
    state.for_each_legal(|e| {
        let mut next = *state;
        let gained = next.play(e).expect("legal move") as i32;
        let v = if gained > 0 {
            gained + negamax(&next, memo)
        } else {
            -negamax(&next, memo)
        };
        best = best.max(v);
    });
    memo.insert(state.edge_mask(), best);
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::board::{BoardGeometry, EdgeIndex, Side};

    #[test]
    fn terminal_is_zero() {
        let g = BoardGeometry::new(1, 2).unwrap();
        let all: alloc::vec::Vec<_> = g.edges().collect();
        let s = BoardState::from_position(g, &all, [1, 1], Side::P2).unwrap();
        assert_eq!(minimax_oracle(&s, DEFAULT_BOUND).unwrap(), 0);
    }

    #[test]
    fn empty_1x1_loses() {
        assert_eq!(
            minimax_oracle(&BoardState::new(1, 1).unwrap(), DEFAULT_BOUND).unwrap(),
            -1
        );
    }

    #[test]
    fn single_move_completing_two() {
        let g = BoardGeometry::new(1, 2).unwrap();
        let shared = g.v(0, 1);
        let others: alloc::vec::Vec<EdgeIndex> = g.edges().filter(|&e| e != shared).collect();
        let s = BoardState::from_position(g, &others, [0, 0], Side::P1).unwrap();
        assert_eq!(minimax_oracle(&s, DEFAULT_BOUND).unwrap(), 2);
    }

    #[test]
    fn bound_enforced() {
        let s = BoardState::new(3, 3).unwrap();
        assert_eq!(
            minimax_oracle(&s, DEFAULT_BOUND),
            Err(Error::SearchBound {
                remaining: 24,
                bound: 12
            })
        );
    }
}
