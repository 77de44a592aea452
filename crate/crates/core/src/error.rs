use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("state is not normalized (norm deviates by {0:.3e})")]
    NotNormalized(f64),

    #[error("invalid POVM: completeness residual {0:.3e}")]
    InvalidPovm(f64),

    #[error("dense cap exceeded: {needed} qubits per side, cap is {cap}")]
    DenseCapExceeded { needed: u32, cap: u32 },

    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    EpsilonOutOfRange(f64),

    #[error("qubit count {0} exceeds what the index arithmetic supports")]
    QubitOverflow(u32),

    #[error("unsupported game shape: {0}")]
    UnsupportedGame(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("search space of {size} strategies exceeds the cap of {cap}")]
    SearchCapExceeded { size: u128, cap: u128 },

    #[error("synthesis failed: best distance {best:.6} with at most {max_slots} slots")]
    SynthesisFailed { best: f64, max_slots: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
