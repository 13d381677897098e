//! Dots-and-Boxes rules on a rectangular grid of boxes.
//!
//! Edges are numbered horizontals first, row-major, then verticals, row-major:
//! `h(r, c) = r * cols + c` for `r` in `0..=rows`, `c` in `0..cols`, and
//! `v(r, c) = cols * (rows + 1) + r * (cols + 1) + c` for `r` in `0..rows`,
//! `c` in `0..=cols`. Box `(r, c)` is bounded by `h(r, c)`, `h(r + 1, c)`,
//! `v(r, c)` and `v(r, c + 1)`. Board encodings, network outputs and genome
//! layout all share this order.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Edge occupancy is stored in a `u128`, which caps the edge count.
pub const MAX_EDGES: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeIndex(pub u8);

impl EdgeIndex {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoardGeometry {
    rows: u8,
    cols: u8,
}

impl BoardGeometry {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        let bad = Error::InvalidDimensions { rows, cols };
        if rows == 0 || cols == 0 || rows > 255 || cols > 255 {
            return Err(bad);
        }
        if cols * (rows + 1) + rows * (cols + 1) > MAX_EDGES {
            return Err(bad);
        }
        Ok(Self {
            rows: rows as u8,
            cols: cols as u8,
        })
    }

    /// The 3x3 board every network and genome is built for.
    pub fn standard() -> Self {
        Self { rows: 3, cols: 3 }
    }

    #[inline]
    pub fn rows(self) -> usize {
        self.rows as usize
    }

    #[inline]
    pub fn cols(self) -> usize {
        self.cols as usize
    }

    #[inline]
    pub fn edge_count(self) -> usize {
        let (r, c) = (self.rows(), self.cols());
        c * (r + 1) + r * (c + 1)
    }

    #[inline]
    pub fn box_count(self) -> usize {
        self.rows() * self.cols()
    }

    #[inline]
    fn horizontal_count(self) -> usize {
        self.cols() * (self.rows() + 1)
    }

    /// Horizontal edge on dot row `r` (`0..=rows`) between dot columns `c` and `c + 1`.
    #[inline]
    pub fn h(self, r: usize, c: usize) -> EdgeIndex {
        debug_assert!(r <= self.rows() && c < self.cols());
        EdgeIndex((r * self.cols() + c) as u8)
    }

    /// Vertical edge in box row `r` on dot column `c` (`0..=cols`).
    #[inline]
    pub fn v(self, r: usize, c: usize) -> EdgeIndex {
        debug_assert!(r < self.rows() && c <= self.cols());
        EdgeIndex((self.horizontal_count() + r * (self.cols() + 1) + c) as u8)
    }

    /// Edges of box `(r, c)`: top, bottom, left, right.
    #[inline]
    pub fn box_edges(self, r: usize, c: usize) -> [EdgeIndex; 4] {
        [
            self.h(r, c),
            self.h(r + 1, c),
            self.v(r, c),
            self.v(r, c + 1),
        ]
    }

    /// Box ordinal `r * cols + c` used for hidden units.
    #[inline]
    pub fn box_ordinal(self, r: usize, c: usize) -> usize {
        r * self.cols() + c
    }

    /// Boxes (as `(row, col)`) that the edge borders; one or two of them.
    pub fn boxes_of(self, e: EdgeIndex) -> [Option<(usize, usize)>; 2] {
        let i = e.index();
        let (rows, cols) = (self.rows(), self.cols());
        if i < self.horizontal_count() {
            let (r, c) = (i / cols, i % cols);
            [
                if r > 0 { Some((r - 1, c)) } else { None },
                if r < rows { Some((r, c)) } else { None },
            ]
        } else {
            let j = i - self.horizontal_count();
            let (r, c) = (j / (cols + 1), j % (cols + 1));
            [
                if c > 0 { Some((r, c - 1)) } else { None },
                if c < cols { Some((r, c)) } else { None },
            ]
        }
    }

    pub fn edges(self) -> impl Iterator<Item = EdgeIndex> {
        (0..self.edge_count()).map(|i| EdgeIndex(i as u8))
    }

    fn full_mask(self) -> u128 {
        if self.edge_count() == 128 {
            u128::MAX
        } else {
            (1u128 << self.edge_count()) - 1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    P1,
    P2,
}

impl Side {
    #[inline]
    pub fn other(self) -> Side {
        match self {
            Side::P1 => Side::P2,
            Side::P2 => Side::P1,
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Side::P1 => 0,
            Side::P2 => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameResult {
    Ongoing,
    WinP1,
    WinP2,
    Tie,
}

impl GameResult {
    pub fn winner(self) -> Option<Side> {
        match self {
            GameResult::WinP1 => Some(Side::P1),
            GameResult::WinP2 => Some(Side::P2),
            _ => None,
        }
    }
}

/// The official game record. Small and `Copy`, so search and training branch
/// by value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BoardState {
    geometry: BoardGeometry,
    edges: u128,
    score: [u8; 2],
    to_move: Side,
}

impl BoardState {
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        Ok(Self::empty(BoardGeometry::new(rows, cols)?))
    }

    pub fn empty(geometry: BoardGeometry) -> Self {
        Self {
            geometry,
            edges: 0,
            score: [0, 0],
            to_move: Side::P1,
        }
    }

    /// Builds an arbitrary position. The scores must account for exactly the
    /// completed boxes.
    pub fn from_position(
        geometry: BoardGeometry,
        occupied: &[EdgeIndex],
        score: [u8; 2],
        to_move: Side,
    ) -> Result<Self> {
        let mut edges = 0u128;
        for &e in occupied {
            if e.index() >= geometry.edge_count() {
                return Err(Error::InvalidMove(e.index()));
            }
            edges |= 1 << e.0;
        }
        let state = Self {
            geometry,
            edges,
            score,
            to_move,
        };
        let completed = state.completed_boxes();
        if score[0] as usize + score[1] as usize != completed {
            return Err(Error::Config(alloc::format!(
                "scores {}-{} do not match {} completed boxes",
                score[0],
                score[1],
                completed
            )));
        }
        Ok(state)
    }

    #[inline]
    pub fn geometry(&self) -> BoardGeometry {
        self.geometry
    }

    #[inline]
    pub fn to_move(&self) -> Side {
        self.to_move
    }

    #[inline]
    pub fn score(&self, side: Side) -> u8 {
        self.score[side.index()]
    }

    #[inline]
    pub fn scores(&self) -> [u8; 2] {
        self.score
    }

    /// Occupancy bitmask, bit `e` set iff edge `e` is drawn.
    #[inline]
    pub fn edge_mask(&self) -> u128 {
        self.edges
    }

    #[inline]
    pub fn moves_played(&self) -> usize {
        self.edges.count_ones() as usize
    }

    #[inline]
    pub fn is_occupied(&self, e: EdgeIndex) -> bool {
        self.edges >> e.0 & 1 == 1
    }

    #[inline]
    pub fn is_terminal(&self) -> bool {
        self.edges == self.geometry.full_mask()
    }

    pub fn remaining_moves(&self) -> usize {
        self.geometry.edge_count() - self.moves_played()
    }

    pub fn legal_moves(&self) -> Vec<EdgeIndex> {
        let mut out = Vec::with_capacity(self.remaining_moves());
        self.for_each_legal(|e| out.push(e));
        out
    }

    #[inline]
    pub fn for_each_legal(&self, mut f: impl FnMut(EdgeIndex)) {
        let mut free = !self.edges & self.geometry.full_mask();
        while free != 0 {
            let i = free.trailing_zeros();
            f(EdgeIndex(i as u8));
            free &= free - 1;
        }
    }

    /// Number of drawn sides of box `(r, c)`.
    #[inline]
    pub fn box_sides(&self, r: usize, c: usize) -> u32 {
        self.geometry
            .box_edges(r, c)
            .iter()
            .filter(|&&e| self.is_occupied(e))
            .count() as u32
    }

    pub fn completed_boxes(&self) -> usize {
        let g = self.geometry;
        (0..g.rows())
            .flat_map(|r| (0..g.cols()).map(move |c| (r, c)))
            .filter(|&(r, c)| self.box_sides(r, c) == 4)
            .count()
    }

    /// Boxes the unoccupied edge `e` would complete.
    #[inline]
    pub(crate) fn completes(&self, e: EdgeIndex) -> u8 {
        self.geometry
            .boxes_of(e)
            .iter()
            .flatten()
            .filter(|&&(r, c)| self.box_sides(r, c) == 3)
            .count() as u8
    }

    /// Whether drawing `e` would leave some adjacent box with exactly three sides.
    #[inline]
    pub(crate) fn gives_third_side(&self, e: EdgeIndex) -> bool {
        self.geometry
            .boxes_of(e)
            .iter()
            .flatten()
            .any(|&(r, c)| self.box_sides(r, c) == 2)
    }

    pub fn boxes_completed_by(&self, e: EdgeIndex) -> Result<u8> {
        self.check_legal(e)?;
        Ok(self.completes(e))
    }

    fn check_legal(&self, e: EdgeIndex) -> Result<()> {
        if self.is_terminal() {
            return Err(Error::GameOver);
        }
        if e.index() >= self.geometry.edge_count() || self.is_occupied(e) {
            return Err(Error::InvalidMove(e.index()));
        }
        Ok(())
    }

    /// Draws `e` in place. Completing a box keeps the turn unless the game ended.
    pub fn play(&mut self, e: EdgeIndex) -> Result<u8> {
        self.check_legal(e)?;
        let gained = self.completes(e);
        self.edges |= 1 << e.0;
        self.score[self.to_move.index()] += gained;
        if gained == 0 || self.is_terminal() {
            self.to_move = self.to_move.other();
        }
        Ok(gained)
    }

    pub fn apply_move(&self, e: EdgeIndex) -> Result<(BoardState, u8)> {
        let mut next = *self;
        let gained = next.play(e)?;
        Ok((next, gained))
    }

    pub fn result(&self) -> GameResult {
        if !self.is_terminal() {
            return GameResult::Ongoing;
        }
        match self.score[0].cmp(&self.score[1]) {
            core::cmp::Ordering::Greater => GameResult::WinP1,
            core::cmp::Ordering::Less => GameResult::WinP2,
            core::cmp::Ordering::Equal => GameResult::Tie,
        }
    }

    /// ASCII diagram: one line per dot row, `.` for a dot, `!` in place of a
    /// dot whose vertical edge to the row above is drawn, `_` for a drawn
    /// horizontal edge between dots.
    pub fn render(&self) -> String {
        let g = self.geometry;
        let mut s = String::new();
        for r in 0..=g.rows() {
            for c in 0..=g.cols() {
                let vertical = r > 0 && self.is_occupied(g.v(r - 1, c));
                s.push(if vertical { '!' } else { '.' });
                if c < g.cols() {
                    s.push(if self.is_occupied(g.h(r, c)) {
                        '_'
                    } else {
                        ' '
                    });
                }
            }
            s.push('\n');
        }
        s
    }

    /// Reads the edges of a diagram produced by [`render`](Self::render).
    /// Trailing whitespace on each line is ignored.
    pub fn parse_edges(geometry: BoardGeometry, text: &str) -> Result<Vec<EdgeIndex>> {
        let bad = |msg: &str| Error::Config(alloc::format!("bad board diagram: {msg}"));
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        if lines.len() != geometry.rows() + 1 {
            return Err(bad("wrong number of dot rows"));
        }
        let mut edges = Vec::new();
        for (r, line) in lines.iter().enumerate() {
            let chars: Vec<char> = line.trim_end().chars().collect();
            let width = 2 * geometry.cols() + 1;
            for i in 0..width {
                let ch = chars.get(i).copied().unwrap_or(' ');
                if i % 2 == 0 {
                    match ch {
                        '.' => {}
                        '!' if r > 0 => edges.push(geometry.v(r - 1, i / 2)),
                        _ => return Err(bad("expected '.' or '!' at a dot position")),
                    }
                } else {
                    match ch {
                        ' ' => {}
                        '_' => edges.push(geometry.h(r, i / 2)),
                        _ => return Err(bad("expected ' ' or '_' between dots")),
                    }
                }
            }
        }
        edges.sort();
        Ok(edges)
    }
}
