use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid board dimensions {rows}x{cols}")]
    InvalidDimensions { rows: usize, cols: usize },
    #[error("invalid move: edge {0}")]
    InvalidMove(usize),
    #[error("game is already over")]
    GameOver,
    #[error("expected a 3x3 board, got {rows}x{cols}")]
    WrongGeometry { rows: usize, cols: usize },
    #[error("quantization index {0} out of range 0..=1023")]
    QuantIndexOutOfRange(u32),
    #[error("parameter {index} = {value} outside [-64, 64]")]
    ParameterOutOfRange { index: usize, value: f64 },
    #[error("genome must be {expected} bytes, got {actual}")]
    GenomeLength { expected: usize, actual: usize },
    #[error("all fitness values are zero")]
    ZeroFitness,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("search bound exceeded: {remaining} edges remaining, bound {bound}")]
    SearchBound { remaining: usize, bound: usize },
    #[error("number of games must be even and positive, got {0}")]
    OddGameCount(usize),
    #[error("training set is empty")]
    EmptyTrainingSet,
}

pub type Result<T> = core::result::Result<T, Error>;
