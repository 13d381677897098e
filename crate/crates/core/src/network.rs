//! The 24-9-24 feed-forward move recommender.
//!
//! One input per edge (1.0 when drawn), one hidden unit per box, one output
//! per edge. Every unit is logistic with a threshold subtracted from its net
//! input. The move played is the legal edge with the highest output.

use alloc::vec::Vec;

use crate::board::{BoardGeometry, BoardState, EdgeIndex};
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub const INPUTS: usize = 24;
pub const HIDDEN: usize = 9;
pub const OUTPUTS: usize = 24;
pub const WEIGHT_COUNT: usize = HIDDEN * INPUTS + OUTPUTS * HIDDEN;
pub const PARAM_COUNT: usize = WEIGHT_COUNT + HIDDEN + OUTPUTS;

const _: () = assert!(WEIGHT_COUNT == 432 && PARAM_COUNT == 465);

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoardEncoding(pub [f64; INPUTS]);

pub fn encode_board(state: &BoardState) -> Result<BoardEncoding> {
    let g = state.geometry();
    if g != BoardGeometry::standard() {
        return Err(Error::WrongGeometry {
            rows: g.rows(),
            cols: g.cols(),
        });
    }
    let mut inputs = [0.0; INPUTS];
    for (i, x) in inputs.iter_mut().enumerate() {
        if state.is_occupied(EdgeIndex(i as u8)) {
            *x = 1.0;
        }
    }
    Ok(BoardEncoding(inputs))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub hidden_weights: [[f64; INPUTS]; HIDDEN],
    pub hidden_thresholds: [f64; HIDDEN],
    pub output_weights: [[f64; HIDDEN]; OUTPUTS],
    pub output_thresholds: [f64; OUTPUTS],
}

/// Hidden and output activations of one forward pass.
#[derive(Debug, Clone, Copy)]
pub struct Activations {
    pub hidden: [f64; HIDDEN],
    pub output: [f64; OUTPUTS],
}

impl Default for Network {
    fn default() -> Self {
        Self::zeros()
    }
}

impl Network {
    pub fn zeros() -> Self {
        Self {
            hidden_weights: [[0.0; INPUTS]; HIDDEN],
            hidden_thresholds: [0.0; HIDDEN],
            output_weights: [[0.0; HIDDEN]; OUTPUTS],
            output_thresholds: [0.0; OUTPUTS],
        }
    }

    /// Parameters in genome order: each hidden unit's 24 weights then its
    /// threshold, then each output unit's 9 weights then its threshold.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(PARAM_COUNT);
        for j in 0..HIDDEN {
            out.extend_from_slice(&self.hidden_weights[j]);
            out.push(self.hidden_thresholds[j]);
        }
        for k in 0..OUTPUTS {
            out.extend_from_slice(&self.output_weights[k]);
            out.push(self.output_thresholds[k]);
        }
        out
    }

    pub fn from_params(params: &[f64]) -> Result<Self> {
        if params.len() != PARAM_COUNT {
            return Err(Error::Config(alloc::format!(
                "expected {PARAM_COUNT} parameters, got {}",
                params.len()
            )));
        }
        let mut net = Self::zeros();
        let mut it = params.iter().copied();
        for j in 0..HIDDEN {
            for w in net.hidden_weights[j].iter_mut() {
                *w = it.next().unwrap();
            }
            net.hidden_thresholds[j] = it.next().unwrap();
        }
        for k in 0..OUTPUTS {
            for w in net.output_weights[k].iter_mut() {
                *w = it.next().unwrap();
            }
            net.output_thresholds[k] = it.next().unwrap();
        }
        if let Some((index, &value)) = params.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::ParameterOutOfRange { index, value });
        }
        Ok(net)
    }

    pub fn activations(&self, enc: &BoardEncoding) -> Activations {
        let mut hidden = [0.0; HIDDEN];
        for (j, h) in hidden.iter_mut().enumerate() {
            let net: f64 = self.hidden_weights[j]
                .iter()
                .zip(enc.0.iter())
                .map(|(w, x)| w * x)
                .sum();
            *h = sigmoid(net - self.hidden_thresholds[j]);
        }
        let mut output = [0.0; OUTPUTS];
        for (k, o) in output.iter_mut().enumerate() {
            let net: f64 = self.output_weights[k]
                .iter()
                .zip(hidden.iter())
                .map(|(w, h)| w * h)
                .sum();
            *o = sigmoid(net - self.output_thresholds[k]);
        }
        Activations { hidden, output }
    }

    pub fn forward(&self, enc: &BoardEncoding) -> [f64; OUTPUTS] {
        self.activations(enc).output
    }

    pub fn choose_move(&self, state: &BoardState, rng: &mut RngStream) -> Result<EdgeIndex> {
        if state.is_terminal() {
            return Err(Error::GameOver);
        }
        let outputs = self.forward(&encode_board(state)?);
        Ok(select_move(&outputs, state, rng))
    }

    /// Hand-built box-completion network: hidden unit `j` fires when box `j`
    /// has at least three sides, and each output is excited by the units of
    /// the boxes its edge borders.
    pub fn level1() -> Self {
        const EDGE_WEIGHT: f64 = 8.0;
        const HIDDEN_THRESHOLD: f64 = 20.0;
        const BOX_WEIGHT: f64 = 10.0;
        const OUTPUT_THRESHOLD: f64 = 2.0;

        let g = BoardGeometry::standard();
        let mut net = Self::zeros();
        for r in 0..g.rows() {
            for c in 0..g.cols() {
                let j = g.box_ordinal(r, c);
                for e in g.box_edges(r, c) {
                    net.hidden_weights[j][e.index()] = EDGE_WEIGHT;
                }
                net.hidden_thresholds[j] = HIDDEN_THRESHOLD;
            }
        }
        for e in g.edges() {
            for (r, c) in g.boxes_of(e).into_iter().flatten() {
                net.output_weights[e.index()][g.box_ordinal(r, c)] = BOX_WEIGHT;
            }
            net.output_thresholds[e.index()] = OUTPUT_THRESHOLD;
        }
        net
    }
}

/// Highest-output legal edge, ties broken uniformly.
pub fn select_move(outputs: &[f64; OUTPUTS], state: &BoardState, rng: &mut RngStream) -> EdgeIndex {
    let mut best = f64::NEG_INFINITY;
    let mut ties: [EdgeIndex; OUTPUTS] = [EdgeIndex(0); OUTPUTS];
    let mut n = 0;
    state.for_each_legal(|e| {
        let v = outputs[e.index()];
        if v > best {
            best = v;
            n = 0;
        }
        if v == best {
            ties[n] = e;
            n += 1;
        }
    });
    assert!(n > 0, "no legal move to select");
    if n == 1 {
        ties[0]
    } else {
        ties[rng.below(n)]
    }
}
