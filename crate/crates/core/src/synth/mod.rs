//! The programmable dispatch circuit and gate-program synthesis.
//!
//! The dispatch circuit is a fixed sequence of M controlled slots over a
//! d-qubit working register. Slot i (0-based, applied first-to-last) acts on
//! the cyclically adjacent pair `(2i mod d, 2i+1 mod d)` and applies one of
//! SWAP, CNOT, I(x)H, I(x)T according to the two program bits `(2i, 2i+1)`
//! reading `00`, `01`, `10`, `11`. With the program register in a
//! computational basis state the controls never fire coherently, so
//! evaluating a program classically (decode, then apply) matches running the
//! controlled circuit exactly; that consistency is checked in the tests.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::games::{run_quantum_game, Circuit, CircuitStrategy, MenuOp, QuantumGame};
use crate::qlin::{gates, hermitian_eigen, CMatrix};

mod search;

pub use search::{synthesize, SynthResult};

/// The fixed controlled-dispatch skeleton: slot count and working width.
#[derive(Clone, Copy, Debug)]
pub struct DispatchCircuit {
    slots: usize,
    width: u32,
}

/// Menu order matches the program-bit patterns 00, 01, 10, 11.
pub const GATE_MENU: [MenuOp; 4] = [MenuOp::Swap, MenuOp::Cnot, MenuOp::H, MenuOp::T];

impl DispatchCircuit {
    pub fn new(slots: usize, width: u32) -> Result<Self> {
        if width < 2 {
            return Err(Error::DimensionMismatch(
                "dispatch needs a working register of at least two qubits".into(),
            ));
        }
        Ok(DispatchCircuit { slots, width })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Program bits required: two per slot.
    pub fn ancilla_bits(&self) -> usize {
        2 * self.slots
    }

    /// Working-register pair addressed by slot `i`; the first and last
    /// qubits count as adjacent.
    pub fn slot_targets(&self, i: usize) -> (usize, usize) {
        let d = self.width as usize;
        ((2 * i) % d, (2 * i + 1) % d)
    }

    /// The four menu gates as matrices on a qubit pair.
    pub fn gate_matrices() -> [CMatrix; 4] {
        [
            MenuOp::Swap.matrix(),
            MenuOp::Cnot.matrix(),
            MenuOp::H.matrix(),
            MenuOp::T.matrix(),
        ]
    }

    /// The dispatch as an explicit controlled circuit on
    /// `width + 2*slots` qubits, program register behind the working one.
    pub fn controlled_form(&self) -> Circuit {
        let d = self.width as usize;
        let mut circuit = Circuit::new(self.width + self.ancilla_bits() as u32);
        let menu = Self::gate_matrices();
        for slot in 0..self.slots {
            let (p, q) = self.slot_targets(slot);
            for (code, gate) in menu.iter().enumerate() {
                let b0 = (code >> 1) & 1 == 1;
                let b1 = code & 1 == 1;
                circuit = circuit.controlled(
                    vec![(d + 2 * slot, b0), (d + 2 * slot + 1, b1)],
                    vec![p, q],
                    gate.clone(),
                );
            }
        }
        circuit
    }
}

/// A program: `2M` bits, two per slot, decoded in the fixed menu order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramRegister {
    bits: Vec<bool>,
}

impl ProgramRegister {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        if bits.len() % 2 != 0 {
            return Err(Error::Parse("program needs two bits per slot".into()));
        }
        Ok(ProgramRegister { bits })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(text.len());
        for c in text.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                ' ' | '_' | '.' => {}
                other => return Err(Error::Parse(format!("bad program bit '{other}'"))),
            }
        }
        ProgramRegister::new(bits)
    }

    pub fn from_ops(ops: &[MenuOp]) -> Self {
        let mut bits = Vec::with_capacity(2 * ops.len());
        for op in ops {
            let code = GATE_MENU.iter().position(|m| m == op).expect("menu op");
            bits.push((code >> 1) & 1 == 1);
            bits.push(code & 1 == 1);
        }
        ProgramRegister { bits }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn slot_count(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn slot_code(&self, slot: usize) -> usize {
        usize::from(self.bits[2 * slot]) * 2 + usize::from(self.bits[2 * slot + 1])
    }

    pub fn slot_op(&self, slot: usize) -> MenuOp {
        GATE_MENU[self.slot_code(slot)]
    }

    /// Basis-state index of the program register (bit 0 most significant).
    pub fn basis_index(&self) -> usize {
        self.bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b))
    }
}

impl std::fmt::Display for ProgramRegister {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// Composes the decoded gates, slot 0 first, into a unitary on the working
/// register.
pub fn evaluate(circ: &DispatchCircuit, prog: &ProgramRegister) -> Result<CMatrix> {
    if prog.slot_count() != circ.slots() {
        return Err(Error::DimensionMismatch(format!(
            "program has {} slots, dispatch has {}",
            prog.slot_count(),
            circ.slots()
        )));
    }
    let dim = 1usize << circ.width();
    let mut acc = CMatrix::identity(dim);
    let menu = DispatchCircuit::gate_matrices();
    for slot in 0..circ.slots() {
        let (p, q) = circ.slot_targets(slot);
        let gate = menu[prog.slot_code(slot)].embed(circ.width(), &[p, q]);
        acc = gate.mul(&acc);
    }
    Ok(acc)
}

/// Decoded program as a plain gate-list circuit on the working register.
pub fn program_circuit(circ: &DispatchCircuit, prog: &ProgramRegister) -> Result<Circuit> {
    if prog.slot_count() != circ.slots() {
        return Err(Error::DimensionMismatch(format!(
            "program has {} slots, dispatch has {}",
            prog.slot_count(),
            circ.slots()
        )));
    }
    let mut circuit = Circuit::new(circ.width());
    for slot in 0..circ.slots() {
        let (p, q) = circ.slot_targets(slot);
        circuit = circuit.dense(vec![p, q], prog.slot_op(slot).matrix());
    }
    Ok(circuit)
}

fn opnorm_exact(a: &CMatrix) -> f64 {
    let gram = a.dagger().mul(a);
    let (vals, _) = hermitian_eigen(&gram);
    vals.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

fn shifted(u: &CMatrix, v: &CMatrix, phi: f64) -> CMatrix {
    u.sub(&v.scale(Complex64::from_polar(1.0, phi)))
}

/// Phase-invariant operator-norm distance
/// `min over phi of || u - e^{i phi} v ||`.
///
/// The objective in `phi` is a maximum of at most `dim` shifted sine arcs,
/// so a grid finer than their spacing followed by golden-section refinement
/// finds the global minimum.
pub fn distance(u: &CMatrix, v: &CMatrix) -> Result<f64> {
    if u.rows() != v.rows() || u.cols() != v.cols() || !u.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "distance between {}x{} and {}x{}",
            u.rows(),
            u.cols(),
            v.rows(),
            v.cols()
        )));
    }
    const GRID: usize = 256;
    let step = std::f64::consts::TAU / GRID as f64;
    let mut best_phi = 0.0;
    let mut best = f64::INFINITY;
    for k in 0..GRID {
        let phi = k as f64 * step;
        let value = opnorm_exact(&shifted(u, v, phi));
        if value < best {
            best = value;
            best_phi = phi;
        }
    }
    // golden-section refinement around the best grid point
    let mut lo = best_phi - step;
    let mut hi = best_phi + step;
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - golden * (hi - lo);
    let mut x2 = lo + golden * (hi - lo);
    let mut f1 = opnorm_exact(&shifted(u, v, x1));
    let mut f2 = opnorm_exact(&shifted(u, v, x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - golden * (hi - lo);
            f1 = opnorm_exact(&shifted(u, v, x1));
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + golden * (hi - lo);
            f2 = opnorm_exact(&shifted(u, v, x2));
        }
    }
    Ok(best.min(f1).min(f2).max(0.0))
}

/// Report of one prover round's synthesis.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct RoundProgram {
    pub prover: String,
    pub round: usize,
    pub slots: usize,
    pub program: String,
    /// Phase-invariant operator-norm distance to the original round unitary.
    pub distance: f64,
    /// True when the circuit was already a menu word and was loaded without
    /// any search.
    pub translated: bool,
}

/// End-to-end outcome of rewriting a strategy into dispatch form.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct UniversalReport {
    pub rounds: Vec<RoundProgram>,
    pub omega_original: f64,
    pub omega_universal: f64,
    pub loss: f64,
    pub budget: f64,
    pub pass: bool,
}

/// Tries to read a circuit directly as a dispatch program: every gate must
/// be a dense menu gate sitting on the slot pair its position dictates.
fn translate_circuit(circuit: &Circuit, width: u32) -> Option<ProgramRegister> {
    let probe = DispatchCircuit::new(circuit.gates().len(), width).ok()?;
    let menu = DispatchCircuit::gate_matrices();
    let mut ops = Vec::with_capacity(circuit.gates().len());
    for (slot, gate) in circuit.gates().iter().enumerate() {
        let crate::games::Gate::Dense { targets, matrix } = gate else {
            return None;
        };
        let (p, q) = probe.slot_targets(slot);
        if targets.as_slice() != [p, q] {
            return None;
        }
        let code = menu.iter().position(|m| matrix.max_abs_diff(m) < 1e-12)?;
        ops.push(GATE_MENU[code]);
    }
    Some(ProgramRegister::from_ops(&ops))
}

/// Search depth cap used by [`compile_universal`] when a circuit is not
/// already in menu form.
pub const DEFAULT_MAX_SLOTS: usize = 12;

/// Rewrites every prover circuit of a strategy into dispatch-program form,
/// budgeting `eps / k` of synthesis error per round, then replays the game
/// with the programmed provers. Passes when the end-to-end value loss stays
/// within `eps`.
pub fn compile_universal(
    game: &QuantumGame,
    strat: &CircuitStrategy,
    eps: f64,
    max_slots: usize,
    tol: &Tolerances,
) -> Result<UniversalReport> {
    if eps <= 0.0 {
        return Err(Error::EpsilonOutOfRange(eps));
    }
    let k = game.rounds as usize;
    let per_round = eps / k as f64;
    let mut rounds = Vec::with_capacity(2 * k);
    let mut alice_circuits = Vec::with_capacity(k);
    let mut bob_circuits = Vec::with_capacity(k);

    let handle = |prover: &str,
                      round: usize,
                      circuit: &Circuit,
                      width: u32|
     -> Result<(Circuit, RoundProgram)> {
        if let Some(program) = translate_circuit(circuit, width) {
            let dispatch = DispatchCircuit::new(program.slot_count(), width)?;
            let realized = program_circuit(&dispatch, &program)?;
            let report = RoundProgram {
                prover: prover.into(),
                round,
                slots: program.slot_count(),
                program: program.to_string(),
                distance: 0.0,
                translated: true,
            };
            return Ok((realized, report));
        }
        if width > 3 {
            return Err(Error::UnsupportedGame(format!(
                "working width {width} exceeds the synthesis cap of 3"
            )));
        }
        let target = circuit.flatten();
        let result = synthesize(&target, width, per_round, max_slots)?;
        let Some(program) = result.program else {
            return Err(Error::SynthesisFailed { best: result.distance, max_slots });
        };
        let dispatch = DispatchCircuit::new(program.slot_count(), width)?;
        let realized = program_circuit(&dispatch, &program)?;
        let report = RoundProgram {
            prover: prover.into(),
            round,
            slots: program.slot_count(),
            program: program.to_string(),
            distance: result.distance,
            translated: false,
        };
        Ok((realized, report))
    };

    let alice_width = game.layout.com_x + strat.priv_x;
    let bob_width = game.layout.com_y + strat.priv_y;
    for round in 0..k {
        let (circuit, report) = handle("alice", round, &strat.alice_circuits[round], alice_width)?;
        alice_circuits.push(circuit);
        rounds.push(report);
        let (circuit, report) = handle("bob", round, &strat.bob_circuits[round], bob_width)?;
        bob_circuits.push(circuit);
        rounds.push(report);
    }

    let universal = CircuitStrategy {
        shared_state: strat.shared_state.clone(),
        priv_x: strat.priv_x,
        priv_y: strat.priv_y,
        alice_circuits,
        bob_circuits,
    };
    let omega_original = run_quantum_game(game, strat, tol)?;
    let omega_universal = run_quantum_game(game, &universal, tol)?;
    let loss = omega_original - omega_universal;
    Ok(UniversalReport {
        rounds,
        omega_original,
        omega_universal,
        loss,
        budget: eps,
        pass: omega_universal >= omega_original - eps - tol.value_agree,
    })
}

/// Convenience: the identity-free padding question. The menu has no identity
/// gate, so a program can only idle through cancellations (SWAP pairs on a
/// repeated slot pair); when consecutive slots address different pairs this
/// is impossible and programs of different lengths stay different lengths.
pub fn identity_paddable(width: u32) -> bool {
    // consecutive slots repeat a pair only when the cycle has period one
    width == 2
}

pub use gates_menu_word::menu_word_matrix;

mod gates_menu_word {
    use super::*;

    /// Composes a menu word (applied left to right) into a matrix on a
    /// two-qubit register; handy for tests and for loading fixed words.
    pub fn menu_word_matrix(word: &[MenuOp]) -> CMatrix {
        let mut acc = CMatrix::identity(4);
        for op in word {
            acc = op.matrix().mul(&acc);
        }
        let _ = gates::identity(1);
        acc
    }
}
