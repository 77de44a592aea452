//! Built-in games and their optimal strategies.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlin::gates;
use crate::qlin::{CMatrix, Povm, StateVector};

use super::classical::{ClassicalGame, OwnView, PiSpec};
use super::quantum::{Circuit, CircuitStrategy, QuantumGame, RegisterLayout};
use super::strategy::{PovmBook, PovmStrategy};

/// Looks up a built-in game with its optimal entangled strategy.
pub fn builtin(name: &str) -> Result<(ClassicalGame, PovmStrategy)> {
    match name {
        "chsh" => Ok(chsh()),
        "magic_square" | "magic-square" => Ok(magic_square()),
        other => Err(Error::Parse(format!("unknown built-in game '{other}'"))),
    }
}

/// CHSH: one round, uniform questions, win iff `a xor b = s and t`.
/// The optimal strategy shares one maximally entangled pair and measures in
/// bases rotated by 0 and pi/4 (Alice), pi/8 and -pi/8 (Bob), reaching
/// cos^2(pi/8).
pub fn chsh() -> (ClassicalGame, PovmStrategy) {
    let game = ClassicalGame::new("chsh", 1, (2, 2, 2, 2), PiSpec::Uniform, |h| {
        (h.a[0] ^ h.b[0]) == (h.s[0] & h.t[0])
    })
    .expect("chsh game construction");

    let alice_angles = [0.0, FRAC_PI_4];
    let bob_angles = [FRAC_PI_8, -FRAC_PI_8];
    let mut alice = PovmBook::new();
    let mut bob = PovmBook::new();
    for (q, &theta) in alice_angles.iter().enumerate() {
        alice.insert(question_view(q as u16), rotated_measurement(theta));
    }
    for (q, &theta) in bob_angles.iter().enumerate() {
        bob.insert(question_view(q as u16), rotated_measurement(theta));
    }
    let strat = PovmStrategy::new(gates::epr(), alice, bob).expect("chsh strategy");
    (game, strat)
}

fn question_view(q: u16) -> OwnView {
    OwnView { questions: vec![q], answers: Vec::new() }
}

/// `{|v_0(theta)><v_0|, |v_1><v_1|}` with `v_0 = (cos t, sin t)`.
pub fn rotated_measurement(theta: f64) -> Povm {
    let v0 = [
        Complex64::new(theta.cos(), 0.0),
        Complex64::new(theta.sin(), 0.0),
    ];
    Povm::binary_projective(gates::projector(&v0)).expect("projective pair")
}

/// A deterministic CHSH strategy answering 0 on every question over a
/// product state; it wins exactly when `s and t = 0`, so its value is 3/4.
pub fn chsh_deterministic_zeros() -> PovmStrategy {
    let answer_zero = Povm::new(vec![CMatrix::identity(2), CMatrix::zeros(2, 2)])
        .expect("deterministic POVM");
    let mut alice = PovmBook::new();
    let mut bob = PovmBook::new();
    for q in 0..2 {
        alice.insert(question_view(q), answer_zero.clone());
        bob.insert(question_view(q), answer_zero.clone());
    }
    PovmStrategy::new(StateVector::zero_state(2), alice, bob).expect("deterministic strategy")
}

/// Even-parity three-bit strings: the answers available to the row player.
pub const ROW_ANSWERS: [u8; 4] = [0b000, 0b011, 0b101, 0b110];
/// Odd-parity three-bit strings: the answers available to the column player.
pub const COL_ANSWERS: [u8; 4] = [0b001, 0b010, 0b100, 0b111];

/// Bit of the three-bit string `word` at cell position `pos` (0 is the most
/// significant).
fn word_bit(word: u8, pos: usize) -> u16 {
    ((word >> (2 - pos)) & 1) as u16
}

/// The magic square game: questions pick a row for Alice and a column for
/// Bob, answers index parity-constrained three-bit fills (rows even, columns
/// odd), and the provers win iff the two fills agree on the shared cell.
/// The optimal strategy measures commuting two-qubit Pauli observables on
/// two shared entangled pairs and wins with certainty.
pub fn magic_square() -> (ClassicalGame, PovmStrategy) {
    let game = ClassicalGame::new("magic_square", 1, (3, 3, 4, 4), PiSpec::Uniform, |h| {
        let (r, c) = (h.s[0] as usize, h.t[0] as usize);
        let row_word = ROW_ANSWERS[h.a[0] as usize];
        let col_word = COL_ANSWERS[h.b[0] as usize];
        word_bit(row_word, c) == word_bit(col_word, r)
    })
    .expect("magic square game construction");

    let obs = square_observables();
    let mut alice = PovmBook::new();
    let mut bob = PovmBook::new();
    for r in 0..3usize {
        alice.insert(
            question_view(r as u16),
            joint_measurement(&obs[r][0], &obs[r][1], &ROW_ANSWERS, false),
        );
    }
    for c in 0..3usize {
        bob.insert(
            question_view(c as u16),
            joint_measurement(&obs[0][c], &obs[1][c], &COL_ANSWERS, true),
        );
    }

    // two maximally entangled pairs in bipartite order [A1 A2 | B1 B2]
    let mut amps = vec![Complex64::new(0.0, 0.0); 16];
    for i in 0..4 {
        amps[i * 4 + i] = Complex64::new(0.5, 0.0);
    }
    let shared = StateVector::normalized(amps).expect("two entangled pairs");
    let strat = PovmStrategy::new(shared, alice, bob).expect("magic square strategy");
    (game, strat)
}

/// The two-qubit observable square: every row multiplies to +I, every column
/// to -I, and each entry equals its own transpose (so the column player can
/// reuse the same matrices over the shared pairs).
pub fn square_observables() -> [[CMatrix; 3]; 3] {
    let i = CMatrix::identity(2);
    let x = gates::pauli_x();
    let y = gates::pauli_y();
    let z = gates::pauli_z();
    let neg = Complex64::new(-1.0, 0.0);
    [
        [i.kron(&z), z.kron(&i), z.kron(&z)],
        [x.kron(&i), i.kron(&x), x.kron(&x)],
        [x.kron(&z).scale(neg), z.kron(&x).scale(neg), y.kron(&y)],
    ]
}

/// Projective four-outcome measurement of two commuting +/-1 observables;
/// the third sign is their product. Outcomes are indexed into the
/// parity-constrained answer list (`odd` selects the odd-parity list, whose
/// third bit flips).
fn joint_measurement(o1: &CMatrix, o2: &CMatrix, answers: &[u8; 4], odd: bool) -> Povm {
    let dim = o1.rows();
    let identity = CMatrix::identity(dim);
    let half = Complex64::new(0.5, 0.0);
    let mut elements = vec![CMatrix::zeros(dim, dim); 4];
    for (s1, b1) in [(1.0, 0u8), (-1.0, 1u8)] {
        for (s2, b2) in [(1.0, 0u8), (-1.0, 1u8)] {
            let p1 = identity.add(&o1.scale(Complex64::new(s1, 0.0))).scale(half);
            let p2 = identity.add(&o2.scale(Complex64::new(s2, 0.0))).scale(half);
            let projector = p1.mul(&p2);
            let b3 = b1 ^ b2 ^ u8::from(odd);
            let word = (b1 << 2) | (b2 << 1) | b3;
            let outcome = answers
                .iter()
                .position(|&w| w == word)
                .expect("parity-consistent word");
            elements[outcome] = projector;
        }
    }
    Povm::new(elements).expect("joint measurement POVM")
}

// --- CHSH in circuit form -------------------------------------------------
//
// A lean one-round quantum game: the verifier Hadamards both communication
// qubits into a uniform question superposition and records them; each prover
// rotates its work qubit into the question's measurement basis and writes
// the outcome into the communication qubit with a CNOT (so the com register
// returns question XOR answer, which the verifier undoes when scoring). The
// prover circuits are words over {SWAP, CNOT, I(x)H, I(x)T} on the
// (com, work) pair, which makes them directly loadable into a programmable
// dispatch circuit.

/// One gate of the four-gate menu, acting on a (first, second) qubit pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MenuOp {
    Swap,
    Cnot,
    H,
    T,
}

impl MenuOp {
    pub fn matrix(self) -> CMatrix {
        match self {
            MenuOp::Swap => gates::swap(),
            MenuOp::Cnot => gates::cnot(),
            MenuOp::H => CMatrix::identity(2).kron(&gates::hadamard()),
            MenuOp::T => CMatrix::identity(2).kron(&gates::gate_t()),
        }
    }
}

fn word_circuit(word: &[MenuOp]) -> Circuit {
    let mut circuit = Circuit::new(2);
    for op in word {
        circuit = circuit.dense(vec![0, 1], op.matrix());
    }
    circuit
}

fn t_pow(k: usize) -> Vec<MenuOp> {
    vec![MenuOp::T; k]
}

/// `R_y(pi/4)` on the pair's second qubit, up to global phase:
/// `S H T H S^dag` with `S = T^2`, `S^dag = T^6`.
fn ry_plus_word() -> Vec<MenuOp> {
    let mut w = t_pow(6);
    w.push(MenuOp::H);
    w.extend(t_pow(1));
    w.push(MenuOp::H);
    w.extend(t_pow(2));
    w
}

/// `R_y(-pi/4)` on the second qubit, up to global phase (`T^dag = T^7`).
fn ry_minus_word() -> Vec<MenuOp> {
    let mut w = t_pow(6);
    w.push(MenuOp::H);
    w.extend(t_pow(7));
    w.push(MenuOp::H);
    w.extend(t_pow(2));
    w
}

/// Controlled-Z on the pair (control first qubit).
fn cz_word() -> Vec<MenuOp> {
    vec![MenuOp::H, MenuOp::Cnot, MenuOp::H]
}

/// Controlled-H (control first qubit), via `CH = Ry(pi/4) CZ Ry(-pi/4)`.
fn ch_word() -> Vec<MenuOp> {
    let mut w = ry_minus_word();
    w.extend(cz_word());
    w.extend(ry_plus_word());
    w
}

/// CNOT with control on the pair's second qubit.
fn cnot_reversed_word() -> Vec<MenuOp> {
    vec![MenuOp::Swap, MenuOp::Cnot, MenuOp::Swap]
}

/// Alice's round word: controlled basis unrotation `C[ZH]` (identity for
/// question 0, the pi/4 basis for question 1) followed by the answer CNOT.
pub fn chsh_alice_word() -> Vec<MenuOp> {
    let mut w = ch_word();
    w.extend(cz_word());
    w.extend(cnot_reversed_word());
    w
}

/// Bob's round word: unconditional `R_y(-pi/4)` (the pi/8 basis), a
/// controlled `R_y(pi/2) = HZ` swinging to the -pi/8 basis for question 1,
/// then the answer CNOT.
pub fn chsh_bob_word() -> Vec<MenuOp> {
    let mut w = ry_minus_word();
    w.extend(cz_word());
    w.extend(ch_word());
    w.extend(cnot_reversed_word());
    w
}

/// CHSH as a circuit-model game with menu-word prover circuits; the value
/// equals the POVM formulation's cos^2(pi/8).
pub fn chsh_circuit_game() -> (QuantumGame, CircuitStrategy) {
    // priv_V = [q, rs, rt], one com qubit per prover
    let layout = RegisterLayout { priv_v: 3, com_x: 1, com_y: 1 };
    let prepare = Circuit::new(5).h(3).h(4).cnot(3, 1).cnot(4, 2);
    let mut score = Circuit::new(5);
    for x in 0..2u16 {
        for y in 0..2u16 {
            for s in 0..2u16 {
                for t in 0..2u16 {
                    let a = x ^ s;
                    let b = y ^ t;
                    if (a ^ b) == (s & t) {
                        score = score.controlled_x(
                            vec![(3, x == 1), (4, y == 1), (1, s == 1), (2, t == 1)],
                            0,
                        );
                    }
                }
            }
        }
    }
    let game = QuantumGame {
        name: "chsh-circuit".into(),
        layout,
        rounds: 1,
        verifier_circuits: vec![prepare, score],
        decision_qubit: 0,
    };
    let strat = CircuitStrategy {
        shared_state: gates::epr(),
        priv_x: 1,
        priv_y: 1,
        alice_circuits: vec![word_circuit(&chsh_alice_word())],
        bob_circuits: vec![word_circuit(&chsh_bob_word())],
    };
    (game, strat)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::games::quantum::run_quantum_game;
    use crate::games::value::{classical_value, strategy_value};
    use crate::qlin::validate_povm;

    const TOL: Tolerances = Tolerances::DEFAULT;
    const CHSH_OPTIMUM: f64 = 0.8535533905932737; // cos^2(pi/8)

    #[test]
    fn square_rows_multiply_to_plus_identity_columns_to_minus() {
        let obs = square_observables();
        let id = CMatrix::identity(4);
        for r in 0..3 {
            let prod = obs[r][0].mul(&obs[r][1]).mul(&obs[r][2]);
            assert!(prod.max_abs_diff(&id) < 1e-12, "row {r}");
        }
        for c in 0..3 {
            let prod = obs[0][c].mul(&obs[1][c]).mul(&obs[2][c]);
            assert!(prod.max_abs_diff(&id.scale(Complex64::new(-1.0, 0.0))) < 1e-12, "col {c}");
        }
        // observables commute within rows and columns
        for r in 0..3 {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let ab = obs[r][i].mul(&obs[r][j]);
                let ba = obs[r][j].mul(&obs[r][i]);
                assert!(ab.max_abs_diff(&ba) < 1e-12);
            }
        }
    }

    #[test]
    fn builtin_povms_are_complete() {
        for (_, strat) in [chsh(), magic_square()] {
            for (_, povm) in strat.alice.views().chain(strat.bob.views()) {
                assert!(validate_povm(povm, &TOL).pass);
            }
        }
    }

    #[test]
    fn chsh_optimal_value() {
        let (game, strat) = chsh();
        let value = strategy_value(&game, &strat, &TOL).unwrap();
        assert!((value - CHSH_OPTIMUM).abs() < 1e-12, "value {value}");
    }

    #[test]
    fn chsh_deterministic_zeros_wins_three_quarters() {
        let (game, _) = chsh();
        let strat = chsh_deterministic_zeros();
        let value = strategy_value(&game, &strat, &TOL).unwrap();
        assert!((value - 0.75).abs() < 1e-12);
    }

    #[test]
    fn chsh_classical_value_is_three_quarters() {
        let (game, _) = chsh();
        let value = classical_value(&game).unwrap();
        assert!((value - 0.75).abs() < 1e-15);
    }

    #[test]
    fn magic_square_quantum_strategy_always_wins() {
        let (game, strat) = magic_square();
        let value = strategy_value(&game, &strat, &TOL).unwrap();
        assert!((value - 1.0).abs() < 1e-9, "value {value}");
    }

    #[test]
    fn magic_square_classical_value_is_eight_ninths() {
        let (game, _) = magic_square();
        let value = classical_value(&game).unwrap();
        assert!((value - 8.0 / 9.0).abs() < 1e-12, "value {value}");
    }

    #[test]
    fn menu_words_compose_the_intended_unitaries() {
        let up_to_phase = |got: &CMatrix, want: &CMatrix| -> f64 {
            // align on the largest entry of `want`
            let mut best = (0usize, 0usize);
            let mut mag = 0.0;
            for i in 0..want.rows() {
                for j in 0..want.cols() {
                    if want.get(i, j).norm() > mag {
                        mag = want.get(i, j).norm();
                        best = (i, j);
                    }
                }
            }
            let phase = got.get(best.0, best.1) / want.get(best.0, best.1);
            got.max_abs_diff(&want.scale(phase))
        };

        let ry = |theta: f64| CMatrix::identity(2).kron(&gates::ry(theta));
        assert!(up_to_phase(&word_circuit(&ry_plus_word()).flatten(), &ry(FRAC_PI_4)) < 1e-12);
        assert!(up_to_phase(&word_circuit(&ry_minus_word()).flatten(), &ry(-FRAC_PI_4)) < 1e-12);

        // controlled-H and controlled-Z on (control, target)
        let ch = Circuit::new(2)
            .controlled(vec![(0, true)], vec![1], gates::hadamard())
            .flatten();
        assert!(up_to_phase(&word_circuit(&ch_word()).flatten(), &ch) < 1e-12);

        // Alice: answer CNOT after controlled ZH unrotation
        let zh = gates::pauli_z().mul(&gates::hadamard());
        let alice_target = Circuit::new(2)
            .controlled(vec![(0, true)], vec![1], zh)
            .swap(0, 1)
            .cnot(0, 1)
            .swap(0, 1)
            .flatten();
        assert!(up_to_phase(&word_circuit(&chsh_alice_word()).flatten(), &alice_target) < 1e-11);

        // Bob: unconditional Ry(-pi/4), controlled HZ, answer CNOT
        let hz = gates::hadamard().mul(&gates::pauli_z());
        let bob_target = Circuit::new(2)
            .dense(vec![1], gates::ry(-FRAC_PI_4))
            .controlled(vec![(0, true)], vec![1], hz)
            .swap(0, 1)
            .cnot(0, 1)
            .swap(0, 1)
            .flatten();
        assert!(up_to_phase(&word_circuit(&chsh_bob_word()).flatten(), &bob_target) < 1e-11);
    }

    #[test]
    fn chsh_circuit_game_reaches_the_povm_value() {
        let (game, strat) = chsh_circuit_game();
        let value = run_quantum_game(&game, &strat, &TOL).unwrap();
        assert!((value - CHSH_OPTIMUM).abs() < 1e-9, "value {value}");
    }
}
