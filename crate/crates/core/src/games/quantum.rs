//! Circuit-model games: a verifier with private and communication registers,
//! provers applying unitary circuits, and a final one-qubit readout.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qlin::{CMatrix, StateVector};

/// A primitive circuit operation. `targets[0]` carries the operator's most
/// significant qubit; controls fire on the stated bit values.
#[derive(Clone, Debug)]
pub enum Gate {
    Dense {
        targets: Vec<usize>,
        matrix: CMatrix,
    },
    Controlled {
        controls: Vec<(usize, bool)>,
        targets: Vec<usize>,
        matrix: CMatrix,
    },
}

impl Gate {
    pub fn matrix(&self) -> &CMatrix {
        match self {
            Gate::Dense { matrix, .. } | Gate::Controlled { matrix, .. } => matrix,
        }
    }
}

/// A gate list over a fixed-width register.
#[derive(Clone, Debug, Default)]
pub struct Circuit {
    qubits: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(qubits: u32) -> Self {
        Circuit { qubits, gates: Vec::new() }
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn dense(mut self, targets: Vec<usize>, matrix: CMatrix) -> Self {
        self.gates.push(Gate::Dense { targets, matrix });
        self
    }

    pub fn controlled(
        mut self,
        controls: Vec<(usize, bool)>,
        targets: Vec<usize>,
        matrix: CMatrix,
    ) -> Self {
        self.gates.push(Gate::Controlled { controls, targets, matrix });
        self
    }

    pub fn h(self, target: usize) -> Self {
        self.dense(vec![target], crate::qlin::gates::hadamard())
    }

    pub fn x(self, target: usize) -> Self {
        self.dense(vec![target], crate::qlin::gates::pauli_x())
    }

    pub fn cnot(self, control: usize, target: usize) -> Self {
        self.controlled(vec![(control, true)], vec![target], crate::qlin::gates::pauli_x())
    }

    pub fn swap(self, a: usize, b: usize) -> Self {
        self.dense(vec![a, b], crate::qlin::gates::swap())
    }

    pub fn controlled_x(self, controls: Vec<(usize, bool)>, target: usize) -> Self {
        self.controlled(controls, vec![target], crate::qlin::gates::pauli_x())
    }

    /// Applies the circuit to a state, optionally relocating local qubit
    /// indices through `map` (local index -> global position).
    pub fn apply(&self, state: &StateVector, map: Option<&[usize]>) -> StateVector {
        let relocate = |idx: usize| -> usize {
            match map {
                Some(m) => m[idx],
                None => idx,
            }
        };
        let mut current = state.clone();
        for gate in &self.gates {
            current = match gate {
                Gate::Dense { targets, matrix } => {
                    let t: Vec<usize> = targets.iter().map(|&q| relocate(q)).collect();
                    current.apply_on_qubits(matrix, &t)
                }
                Gate::Controlled { controls, targets, matrix } => {
                    let c: Vec<(usize, bool)> =
                        controls.iter().map(|&(q, v)| (relocate(q), v)).collect();
                    let t: Vec<usize> = targets.iter().map(|&q| relocate(q)).collect();
                    current.apply_controlled(matrix, &t, &c)
                }
            };
        }
        current
    }

    /// Composes the gate list into one dense unitary on the circuit's own
    /// register.
    pub fn flatten(&self) -> CMatrix {
        let dim = 1usize << self.qubits;
        let mut out = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let image = self.apply(&StateVector::basis(self.qubits, col), None);
            for (row, &amp) in image.amplitudes().iter().enumerate() {
                out.set(row, col, amp);
            }
        }
        out
    }

    /// Worst unitarity residual over the gate matrices. A circuit of unitary
    /// gates is unitary.
    pub fn unitarity_residual(&self) -> f64 {
        self.gates
            .iter()
            .map(|g| g.matrix().unitarity_residual())
            .fold(0.0, f64::max)
    }
}

/// Widths of the verifier's registers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterLayout {
    pub priv_v: u32,
    pub com_x: u32,
    pub com_y: u32,
}

impl RegisterLayout {
    pub fn verifier_qubits(&self) -> u32 {
        self.priv_v + self.com_x + self.com_y
    }
}

/// A k-round circuit-model game: verifier circuits `V_1 ... V_{k+1}` on
/// `priv_V + com_X + com_Y`, and the private qubit read out at the end.
#[derive(Clone, Debug)]
pub struct QuantumGame {
    pub name: String,
    pub layout: RegisterLayout,
    pub rounds: u32,
    pub verifier_circuits: Vec<Circuit>,
    pub decision_qubit: usize,
}

impl QuantumGame {
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.verifier_circuits.len() != self.rounds as usize + 1 {
            return Err(Error::InvalidGame(format!(
                "{} verifier circuits for {} rounds",
                self.verifier_circuits.len(),
                self.rounds
            )));
        }
        if self.decision_qubit >= self.layout.priv_v as usize {
            return Err(Error::InvalidGame("decision qubit outside priv_V".into()));
        }
        for (i, c) in self.verifier_circuits.iter().enumerate() {
            if c.qubit_count() != self.layout.verifier_qubits() {
                return Err(Error::InvalidGame(format!(
                    "verifier circuit {i} acts on {} qubits, layout has {}",
                    c.qubit_count(),
                    self.layout.verifier_qubits()
                )));
            }
            let residual = c.unitarity_residual();
            if residual > tol.unitary {
                return Err(Error::InvalidGame(format!(
                    "verifier circuit {i} has unitarity residual {residual:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// Prover circuits plus their shared private state. Alice's circuits act on
/// `com_X + priv_X`, Bob's on `com_Y + priv_Y`; the shared state covers
/// `priv_X + priv_Y` with Alice's half first.
#[derive(Clone, Debug)]
pub struct CircuitStrategy {
    pub shared_state: StateVector,
    pub priv_x: u32,
    pub priv_y: u32,
    pub alice_circuits: Vec<Circuit>,
    pub bob_circuits: Vec<Circuit>,
}

impl CircuitStrategy {
    pub fn validate(&self, game: &QuantumGame, tol: &Tolerances) -> Result<()> {
        if self.shared_state.qubit_count() != self.priv_x + self.priv_y {
            return Err(Error::InvalidStrategy("shared state does not fill priv_X + priv_Y".into()));
        }
        if self.alice_circuits.len() != game.rounds as usize
            || self.bob_circuits.len() != game.rounds as usize
        {
            return Err(Error::InvalidStrategy("one prover circuit per round required".into()));
        }
        for c in &self.alice_circuits {
            if c.qubit_count() != game.layout.com_x + self.priv_x {
                return Err(Error::InvalidStrategy("Alice circuit width mismatch".into()));
            }
            if c.unitarity_residual() > tol.unitary {
                return Err(Error::InvalidStrategy("Alice circuit not unitary".into()));
            }
        }
        for c in &self.bob_circuits {
            if c.qubit_count() != game.layout.com_y + self.priv_y {
                return Err(Error::InvalidStrategy("Bob circuit width mismatch".into()));
            }
            if c.unitarity_residual() > tol.unitary {
                return Err(Error::InvalidStrategy("Bob circuit not unitary".into()));
            }
        }
        Ok(())
    }
}

/// Runs the game: all verifier registers start in `|0>`, the prover privates
/// in the shared state; each round applies `V_j` then `X_j (x) Y_j`; after
/// the last round `V_{k+1}` is applied and the decision qubit is read out.
/// Returns the probability of reading `|1>`.
pub fn run_quantum_game(
    game: &QuantumGame,
    strat: &CircuitStrategy,
    tol: &Tolerances,
) -> Result<f64> {
    run_quantum_game_with_state(game, strat, tol).map(|(value, _)| value)
}

/// Same as [`run_quantum_game`], also returning the joint state right before
/// the final readout.
pub fn run_quantum_game_with_state(
    game: &QuantumGame,
    strat: &CircuitStrategy,
    tol: &Tolerances,
) -> Result<(f64, StateVector)> {
    game.validate(tol)?;
    strat.validate(game, tol)?;

    let pv = game.layout.priv_v as usize;
    let cx = game.layout.com_x as usize;
    let cy = game.layout.com_y as usize;
    let px = strat.priv_x as usize;
    let py = strat.priv_y as usize;
    let total = pv + cx + cy + px + py;
    if total > 30 {
        return Err(Error::QubitOverflow(total as u32));
    }

    // global register order: [priv_V, com_X, com_Y, priv_X, priv_Y]
    let verifier_map: Vec<usize> = (0..pv + cx + cy).collect();
    let alice_map: Vec<usize> = (0..cx)
        .map(|l| pv + l)
        .chain((0..px).map(|l| pv + cx + cy + l))
        .collect();
    let bob_map: Vec<usize> = (0..cy)
        .map(|l| pv + cx + l)
        .chain((0..py).map(|l| pv + cx + cy + px + l))
        .collect();

    // shared state occupies the trailing registers; everything else is |0>
    let dim = 1usize << total;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    amps[..strat.shared_state.dim()].copy_from_slice(strat.shared_state.amplitudes());
    let mut state = StateVector::new(amps, tol)?;

    for round in 0..game.rounds as usize {
        state = game.verifier_circuits[round].apply(&state, Some(&verifier_map));
        state = strat.alice_circuits[round].apply(&state, Some(&alice_map));
        state = strat.bob_circuits[round].apply(&state, Some(&bob_map));
    }
    state = game.verifier_circuits[game.rounds as usize].apply(&state, Some(&verifier_map));
    let value = state.probability_of_one(game.decision_qubit);
    Ok((value, state))
}
