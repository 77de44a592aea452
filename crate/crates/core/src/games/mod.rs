//! Two-prover non-local games: classical-entangled and circuit-model forms,
//! exact value computation, built-in instances, and the classical-to-quantum
//! embedding.

pub mod builtin;
pub mod classical;
pub mod embed;
pub mod json;
pub mod quantum;
pub mod strategy;
pub mod value;

pub use builtin::{builtin, chsh, chsh_circuit_game, magic_square, MenuOp};
pub use classical::{ClassicalGame, History, OwnView, PiSpec};
pub use embed::{embed_classical, naimark_dilation};
pub use quantum::{
    run_quantum_game, run_quantum_game_with_state, Circuit, CircuitStrategy, Gate, QuantumGame,
    RegisterLayout,
};
pub use strategy::{PovmBook, PovmStrategy};
pub use value::{classical_value, classical_value_capped, strategy_value, strategy_value_product};
