//! Back-propagation baseline: training positions recorded from box-completion
//! play against a random player, and online gradient descent on a squared
//! error that ignores illegal moves.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::board::{BoardGeometry, BoardState, Side};
use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::network::{encode_board, BoardEncoding, Network, HIDDEN, INPUTS, OUTPUTS};
use crate::players::{level0_choose, level1_choose};
use crate::rng::{Domain, RngStream};

/// Recommendation for one edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Illegal,
    /// Boxes the move would complete.
    Boxes(u8),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingExample {
    pub board: BoardEncoding,
    pub targets: [Target; OUTPUTS],
}

impl TrainingExample {
    pub fn from_state(state: &BoardState) -> Result<Self> {
        let board = encode_board(state)?;
        let mut targets = [Target::Illegal; OUTPUTS];
        state.for_each_legal(|e| {
            targets[e.index()] = Target::Boxes(state.completes(e));
        });
        Ok(Self { board, targets })
    }

    /// Whether some legal move completes a box.
    pub fn is_informative(&self) -> bool {
        self.targets
            .iter()
            .any(|t| matches!(t, Target::Boxes(k) if *k > 0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainerConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Multiplies box counts into target activations.
    pub target_scale: f64,
    /// Initial parameters are uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 20,
            seed: 0,
            target_scale: 0.5,
            init_scale: 1.0,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be positive".into()));
        }
        if !(self.target_scale > 0.0 && self.target_scale.is_finite()) {
            return Err(Error::Config(format!(
                "target_scale must be positive, got {}",
                self.target_scale
            )));
        }
        if !(self.init_scale >= 0.0 && self.init_scale <= crate::genome::WEIGHT_LIMIT) {
            return Err(Error::Config(format!(
                "init_scale must lie in [0, 64], got {}",
                self.init_scale
            )));
        }
        Ok(())
    }

    /// The untrained starting network for this seed.
    pub fn initial_network(&self) -> Network {
        let mut rng = RngStream::derived(self.seed, Domain::Init, &[]);
        let params: Vec<f64> = (0..crate::network::PARAM_COUNT)
            .map(|_| (2.0 * rng.unit() - 1.0) * self.init_scale)
            .collect();
        Network::from_params(&params).expect("finite parameters")
    }
}

/// Plays `n_games` level-1 vs level-0 games (level 1 first in even games) and
/// records every position where level 1 moves, keeping only those where a
/// box can be completed.
pub fn generate_training_set<E: Executor>(
    n_games: usize,
    seed: u64,
    exec: &E,
) -> Result<Vec<TrainingExample>> {
    let per_game = exec.map(n_games, |g| {
        let mut rng = RngStream::derived(seed, Domain::TrainingSet, &[g as u64]);
        let trainer_side = if g % 2 == 0 { Side::P1 } else { Side::P2 };
        let mut state = BoardState::empty(BoardGeometry::standard());
        let mut out = Vec::new();
        while !state.is_terminal() {
            let e = if state.to_move() == trainer_side {
                let ex = TrainingExample::from_state(&state).expect("3x3 board");
                if ex.is_informative() {
                    out.push(ex);
                }
                level1_choose(&state, &mut rng)
            } else {
                level0_choose(&state, &mut rng)
            };
            state.play(e).expect("heuristic moves are legal");
        }
        out
    });
    Ok(per_game.into_iter().flatten().collect())
}

/// Per-output error (zero on illegal edges) and the loss `½ Σ error²`.
pub fn masked_error(
    outputs: &[f64; OUTPUTS],
    example: &TrainingExample,
    target_scale: f64,
) -> ([f64; OUTPUTS], f64) {
    let mut err = [0.0; OUTPUTS];
    for (k, e) in err.iter_mut().enumerate() {
        if let Target::Boxes(b) = example.targets[k] {
            *e = outputs[k] - target_scale * b as f64;
        }
    }
    let loss = 0.5 * err.iter().map(|e| e * e).sum::<f64>();
    (err, loss)
}

pub fn example_loss(net: &Network, example: &TrainingExample, target_scale: f64) -> f64 {
    masked_error(&net.forward(&example.board), example, target_scale).1
}

/// Loss and its gradient with respect to every parameter, packed in a
/// network-shaped value.
pub fn loss_gradient(
    net: &Network,
    example: &TrainingExample,
    target_scale: f64,
) -> (f64, Network) {
    let act = net.activations(&example.board);
    let (err, loss) = masked_error(&act.output, example, target_scale);
    let mut grad = Network::zeros();
    let mut hidden_back = [0.0; HIDDEN];
    for k in 0..OUTPUTS {
        let o = act.output[k];
        let delta = err[k] * o * (1.0 - o);
        if delta == 0.0 {
            continue;
        }
        for j in 0..HIDDEN {
            grad.output_weights[k][j] = delta * act.hidden[j];
            hidden_back[j] += delta * net.output_weights[k][j];
        }
        grad.output_thresholds[k] = -delta;
    }
    for j in 0..HIDDEN {
        let h = act.hidden[j];
        let delta = hidden_back[j] * h * (1.0 - h);
        for i in 0..INPUTS {
            grad.hidden_weights[j][i] = delta * example.board.0[i];
        }
        grad.hidden_thresholds[j] = -delta;
    }
    (loss, grad)
}

fn descend(net: &mut Network, grad: &Network, rate: f64) {
    for j in 0..HIDDEN {
        for i in 0..INPUTS {
            net.hidden_weights[j][i] -= rate * grad.hidden_weights[j][i];
        }
        net.hidden_thresholds[j] -= rate * grad.hidden_thresholds[j];
    }
    for k in 0..OUTPUTS {
        for j in 0..HIDDEN {
            net.output_weights[k][j] -= rate * grad.output_weights[k][j];
        }
        net.output_thresholds[k] -= rate * grad.output_thresholds[k];
    }
}

/// One online gradient step on a single example.
pub fn train_step(net: &mut Network, example: &TrainingExample, cfg: &TrainerConfig) -> f64 {
    let (loss, grad) = loss_gradient(net, example, cfg.target_scale);
    descend(net, &grad, cfg.learning_rate);
    loss
}

/// Online gradient descent for `cfg.epochs` passes, reshuffling the example
/// order every epoch.
pub fn train_backprop(
    net: &Network,
    data: &[TrainingExample],
    cfg: &TrainerConfig,
) -> Result<Network> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut rng = RngStream::derived(cfg.seed, Domain::Trainer, &[]);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut net = net.clone();
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            train_step(&mut net, &data[i], cfg);
        }
    }
    Ok(net)
}

pub fn mean_loss(net: &Network, data: &[TrainingExample], target_scale: f64) -> f64 {
    if data.is_empty() {
        return 0.0;
    }
    data.iter()
        .map(|ex| example_loss(net, ex, target_scale))
        .sum::<f64>()
        / data.len() as f64
}
