//! Dots-and-Boxes neuroevolution laboratory core.
//!
//! Everything in this crate is pure computation over owned values: the rules
//! engine, the benchmark players, the 24-9-24 network player, the 582-byte
//! genome, the genetic algorithm with its three fitness schemes, masked
//! back-propagation, and the small-board minimax oracle. File formats, the
//! CLI and the thread pool live in the `boxnet-lab` companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod board;
pub mod error;
pub mod evolution;
pub mod exec;
pub mod genome;
pub mod network;
pub mod oracle;
pub mod players;
pub mod rng;
pub mod supervised;
pub mod tournament;

pub use board::{BoardGeometry, BoardState, EdgeIndex, GameResult, Side};
pub use error::{Error, Result};
pub use evolution::{EvolutionConfig, FitnessVector, MatchResult, Snapshot, Variant};
pub use exec::{Executor, Serial};
pub use genome::Genome;
pub use network::{BoardEncoding, Network};
pub use players::{Level0, Level1, Level2, NetworkPlayer, Player};
pub use rng::RngStream;
pub use supervised::{Target, TrainerConfig, TrainingExample};
pub use tournament::{CurvePoint, EvalRecord};
