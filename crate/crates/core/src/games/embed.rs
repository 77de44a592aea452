//! Casting classical-entangled games as circuit-model quantum games.
//!
//! All measurement is deferred to the single final readout. Per round, the
//! verifier swaps the previous answers into private scratch, prepares the
//! next questions coherently (a unitary whose first column carries the
//! square roots of the question distribution), and copies them into private
//! question registers with controlled-NOTs. Provers swap their question into
//! private history and run a Naimark-dilated measurement that writes the
//! answer into the communication register. The last verifier circuit flips
//! the decision qubit on every winning transcript.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qlin::{complete_columns, CMatrix, Povm, StateVector};

use super::classical::{ClassicalGame, History, OwnView};
use super::quantum::{Circuit, CircuitStrategy, QuantumGame, RegisterLayout};
use super::strategy::{PovmBook, PovmStrategy};

/// Unitary realizing a POVM on an ancilla register:
/// `W |psi>|0> = sum_a (M_a |psi>) (x) |a>`, completed over the remaining
/// ancilla sectors by Gram-Schmidt. Needs `outcomes <= 2^anc_qubits`.
pub fn naimark_dilation(povm: &Povm, anc_qubits: u32) -> Result<CMatrix> {
    let anc = 1usize << anc_qubits;
    if povm.outcomes() > anc {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes need more than {anc_qubits} ancilla qubits",
            povm.outcomes()
        )));
    }
    let dim = povm.dim();
    let big = dim * anc;
    let mut defined = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut col = vec![Complex64::new(0.0, 0.0); big];
        for (a, m) in povm.elements().iter().enumerate() {
            for row in 0..dim {
                col[row * anc + a] = m.get(row, i);
            }
        }
        defined.push((i * anc, col));
    }
    complete_columns(big, &defined)
}

/// Bits needed to index `count` values (at least one).
fn field_width(count: usize) -> u32 {
    ((count.max(2) - 1).ilog2() + 1).max(1)
}

/// Bit value at position `pos` (0 = most significant) of `value` in a field
/// of `width` bits.
fn field_bit(value: u16, width: u32, pos: u32) -> bool {
    (value >> (width - 1 - pos)) & 1 == 1
}

/// Pushes `(qubit, bit)` controls encoding `value` across a field starting
/// at `start`.
fn push_field_controls(controls: &mut Vec<(usize, bool)>, start: usize, width: u32, value: u16) {
    for pos in 0..width {
        controls.push((start + pos as usize, field_bit(value, width, pos)));
    }
}

/// Unitary on `cs + ct` qubits whose first column is
/// `sum_{s,t} sqrt(pi(s,t)) |s>|t>`.
fn question_prep(probs: &[f64], cs: u32, ct: u32, t_size: usize) -> Result<CMatrix> {
    let dim = 1usize << (cs + ct);
    let mut col = vec![Complex64::new(0.0, 0.0); dim];
    for (cell, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let s = cell / t_size;
        let t = cell % t_size;
        let index = (s << ct) | t;
        col[index] = Complex64::new(p.sqrt(), 0.0);
    }
    complete_columns(dim, &[(0, col)])
}

/// Register geometry of an embedding; all offsets are local to their
/// circuit's qubit numbering.
struct Geometry {
    k: usize,
    cs: u32,
    ct: u32,
    ca: u32,
    cb: u32,
    com_x: u32,
    com_y: u32,
    priv_v: u32,
    hist: u32, // history qubits per prover side (padded to the larger side)
    m: u32,
}

impl Geometry {
    fn new(game: &ClassicalGame, m: u32) -> Geometry {
        let k = game.rounds() as usize;
        let cs = field_width(game.s_size());
        let ct = field_width(game.t_size());
        let ca = field_width(game.a_size());
        let cb = field_width(game.b_size());
        let hist_a = k as u32 * cs + (k as u32 - 1) * ca;
        let hist_b = k as u32 * ct + (k as u32 - 1) * cb;
        Geometry {
            k,
            cs,
            ct,
            ca,
            cb,
            com_x: cs.max(ca),
            com_y: ct.max(cb),
            priv_v: 1 + k as u32 * (cs + ct) + k as u32 * (ca + cb),
            hist: hist_a.max(hist_b),
            m,
        }
    }

    // priv_V layout: [q][R_1 .. R_k][SA_1 .. SA_k]
    fn r_start(&self, round: usize) -> usize {
        1 + round * (self.cs + self.ct) as usize
    }

    fn sa_start(&self, round: usize) -> usize {
        1 + self.k * (self.cs + self.ct) as usize + round * (self.ca + self.cb) as usize
    }

    // verifier circuit locals: [priv_V][com_X][com_Y]
    fn v_com_x(&self) -> usize {
        self.priv_v as usize
    }

    fn v_com_y(&self) -> usize {
        (self.priv_v + self.com_x) as usize
    }

    // prover circuit locals: [com][HS_1..HS_k][HA_1..HA_{k-1}][pad][work]
    fn prover_width(&self, com: u32) -> u32 {
        com + self.hist + self.m
    }

    fn hs_start(&self, com: u32, round: usize, cq: u32) -> usize {
        com as usize + round * cq as usize
    }

    fn ha_start(&self, com: u32, round: usize, cq: u32, canc: u32) -> usize {
        com as usize + self.k * cq as usize + round * canc as usize
    }

    fn work_start(&self, com: u32) -> usize {
        (com + self.hist) as usize
    }
}

/// Builds one prover's round circuits.
#[allow(clippy::too_many_arguments)]
fn prover_circuits(
    geo: &Geometry,
    book: &PovmBook,
    com: u32,
    cq: u32,   // question field width for this prover
    canc: u32, // answer field width for this prover
    q_size: usize,
    a_size: usize,
) -> Result<Vec<Circuit>> {
    let width = geo.prover_width(com);
    let mut circuits = Vec::with_capacity(geo.k);
    for round in 0..geo.k {
        let mut circuit = Circuit::new(width);
        // move the question into private history, leaving com zeroed
        for pos in 0..cq {
            circuit = circuit.swap(pos as usize, geo.hs_start(com, round, cq) + pos as usize);
        }
        // one dilated measurement per own view, controlled on that view
        for view in own_views(round, q_size, a_size) {
            let povm = book.get(&view)?;
            let w = naimark_dilation(povm, canc)?;
            let mut controls = Vec::new();
            for (r, &q) in view.questions.iter().enumerate() {
                push_field_controls(&mut controls, geo.hs_start(com, r, cq), cq, q);
            }
            for (r, &ans) in view.answers.iter().enumerate() {
                push_field_controls(&mut controls, geo.ha_start(com, r, cq, canc), canc, ans);
            }
            let mut targets: Vec<usize> =
                (0..geo.m as usize).map(|i| geo.work_start(com) + i).collect();
            targets.extend(0..canc as usize); // answer lands in com
            circuit = circuit.controlled(controls, targets, w);
        }
        // keep a private copy of the answer for later rounds
        if round + 1 < geo.k {
            for pos in 0..canc as usize {
                circuit = circuit.cnot(pos, geo.ha_start(com, round, cq, canc) + pos);
            }
        }
        circuits.push(circuit);
    }
    Ok(circuits)
}

fn own_views(round: usize, q_size: usize, a_size: usize) -> Vec<OwnView> {
    let mut views = vec![OwnView { questions: Vec::new(), answers: Vec::new() }];
    for r in 0..=round {
        let mut next = Vec::new();
        for v in &views {
            for q in 0..q_size as u16 {
                let mut grown = v.clone();
                grown.questions.push(q);
                if r == round {
                    next.push(grown);
                } else {
                    for a in 0..a_size as u16 {
                        let mut answered = grown.clone();
                        answered.answers.push(a);
                        next.push(answered);
                    }
                }
            }
        }
        views = next;
    }
    views
}

/// History prefixes of the given length with nonzero probability mass.
fn reachable_prefixes(game: &ClassicalGame, rounds: usize) -> Vec<(History, f64)> {
    let mut prefixes = vec![(History::default(), 1.0)];
    for round in 0..rounds {
        let mut next = Vec::new();
        for (prefix, mass) in &prefixes {
            let Ok(pi) = game.pi(round, prefix) else { continue };
            for s in 0..game.s_size() as u16 {
                for t in 0..game.t_size() as u16 {
                    let w = pi[s as usize * game.t_size() + t as usize];
                    if w == 0.0 {
                        continue;
                    }
                    for a in 0..game.a_size() as u16 {
                        for b in 0..game.b_size() as u16 {
                            next.push((
                                prefix.with_questions(s, t).with_answers(a, b),
                                mass * w,
                            ));
                        }
                    }
                }
            }
        }
        prefixes = next;
    }
    prefixes
}

/// Rewrites a classical game with a POVM strategy as a quantum circuit game
/// with a circuit strategy of equal value.
pub fn embed_classical(
    game: &ClassicalGame,
    strat: &PovmStrategy,
    tol: &Tolerances,
) -> Result<(QuantumGame, CircuitStrategy)> {
    strat.validate(tol)?;
    let geo = Geometry::new(game, strat.side_qubits());
    let k = geo.k;
    let layout = RegisterLayout {
        priv_v: geo.priv_v,
        com_x: geo.com_x,
        com_y: geo.com_y,
    };
    let vw = layout.verifier_qubits();

    let mut verifier_circuits = Vec::with_capacity(k + 1);
    for round in 0..k {
        let mut circuit = Circuit::new(vw);
        if round > 0 {
            // stash the previous answers, zeroing the com registers
            for pos in 0..geo.ca as usize {
                circuit = circuit.swap(geo.v_com_x() + pos, geo.sa_start(round - 1) + pos);
            }
            for pos in 0..geo.cb as usize {
                circuit = circuit.swap(
                    geo.v_com_y() + pos,
                    geo.sa_start(round - 1) + geo.ca as usize + pos,
                );
            }
        }
        // question preparation, controlled on the recorded history
        let mut targets: Vec<usize> = (0..geo.cs as usize).map(|p| geo.v_com_x() + p).collect();
        targets.extend((0..geo.ct as usize).map(|p| geo.v_com_y() + p));
        for (prefix, _) in reachable_prefixes(game, round) {
            let pi = game.pi(round, &prefix)?;
            let prep = question_prep(&pi, geo.cs, geo.ct, game.t_size())?;
            if round == 0 {
                circuit = circuit.dense(targets.clone(), prep);
            } else {
                let mut controls = Vec::new();
                for (r, (&s, &t)) in prefix.s.iter().zip(&prefix.t).enumerate() {
                    push_field_controls(&mut controls, geo.r_start(r), geo.cs, s);
                    push_field_controls(
                        &mut controls,
                        geo.r_start(r) + geo.cs as usize,
                        geo.ct,
                        t,
                    );
                }
                for (r, (&a, &b)) in prefix.a.iter().zip(&prefix.b).enumerate() {
                    push_field_controls(&mut controls, geo.sa_start(r), geo.ca, a);
                    push_field_controls(
                        &mut controls,
                        geo.sa_start(r) + geo.ca as usize,
                        geo.cb,
                        b,
                    );
                }
                circuit = circuit.controlled(controls, targets.clone(), prep);
            }
        }
        // record the questions
        for pos in 0..geo.cs as usize {
            circuit = circuit.cnot(geo.v_com_x() + pos, geo.r_start(round) + pos);
        }
        for pos in 0..geo.ct as usize {
            circuit = circuit.cnot(geo.v_com_y() + pos, geo.r_start(round) + geo.cs as usize + pos);
        }
        verifier_circuits.push(circuit);
    }

    // final circuit: stash the last answers, then flip q on winning records
    let mut final_circuit = Circuit::new(vw);
    for pos in 0..geo.ca as usize {
        final_circuit = final_circuit.swap(geo.v_com_x() + pos, geo.sa_start(k - 1) + pos);
    }
    for pos in 0..geo.cb as usize {
        final_circuit =
            final_circuit.swap(geo.v_com_y() + pos, geo.sa_start(k - 1) + geo.ca as usize + pos);
    }
    for history in game.winning_set() {
        let mut controls = Vec::new();
        for r in 0..k {
            push_field_controls(&mut controls, geo.r_start(r), geo.cs, history.s[r]);
            push_field_controls(
                &mut controls,
                geo.r_start(r) + geo.cs as usize,
                geo.ct,
                history.t[r],
            );
            push_field_controls(&mut controls, geo.sa_start(r), geo.ca, history.a[r]);
            push_field_controls(
                &mut controls,
                geo.sa_start(r) + geo.ca as usize,
                geo.cb,
                history.b[r],
            );
        }
        final_circuit = final_circuit.controlled_x(controls, 0);
    }
    verifier_circuits.push(final_circuit);

    let quantum_game = QuantumGame {
        name: format!("{}-embedded", game.name),
        layout,
        rounds: game.rounds(),
        verifier_circuits,
        decision_qubit: 0,
    };

    let alice_circuits = prover_circuits(
        &geo,
        &strat.alice,
        geo.com_x,
        geo.cs,
        geo.ca,
        game.s_size(),
        game.a_size(),
    )?;
    let bob_circuits = prover_circuits(
        &geo,
        &strat.bob,
        geo.com_y,
        geo.ct,
        geo.cb,
        game.t_size(),
        game.b_size(),
    )?;

    // shared state: history/pad qubits |0>, the original state on the work
    // qubits, Alice's side first
    let m = geo.m;
    let px = geo.hist + m;
    let py = geo.hist + m;
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << (px + py)];
    let side = 1usize << m;
    for x in 0..side {
        for y in 0..side {
            amps[(x << py) | y] = strat.shared_state().amplitude((x << m) | y);
        }
    }
    let strategy = CircuitStrategy {
        shared_state: StateVector::new(amps, tol)?,
        priv_x: px,
        priv_y: py,
        alice_circuits,
        bob_circuits,
    };
    Ok((quantum_game, strategy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::random::{random_povm, random_state};
    use crate::qlin::{measure, tensor};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: Tolerances = Tolerances::DEFAULT;

    #[test]
    fn dilation_is_unitary_and_acts_as_the_povm() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let povm = random_povm(4, 3, &mut rng);
        let w = naimark_dilation(&povm, 2).unwrap();
        assert!(w.unitarity_residual() < 1e-9);

        let psi = random_state(2, &mut rng);
        let padded = tensor(&psi, &StateVector::zero_state(2));
        let image = StateVector::normalized(w.apply(padded.amplitudes()).unwrap()).unwrap();
        // the ancilla outcome distribution equals the POVM statistics
        let stats = measure(&povm, &psi, &TOL).unwrap();
        for a in 0..3usize {
            let prob: f64 = image
                .amplitudes()
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx % 4 == a)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            assert!((prob - stats.probabilities[a]).abs() < 1e-10);
        }
    }

    #[test]
    fn field_encoding_is_register_ordered() {
        assert_eq!(field_width(2), 1);
        assert_eq!(field_width(3), 2);
        assert_eq!(field_width(4), 2);
        assert!(field_bit(0b10, 2, 0));
        assert!(!field_bit(0b10, 2, 1));
    }

    #[test]
    fn question_prep_carries_the_distribution() {
        let prep = question_prep(&[0.25, 0.25, 0.25, 0.25], 1, 1, 2).unwrap();
        assert!(prep.is_unitary(1e-10));
        for idx in 0..4 {
            assert!((prep.get(idx, 0).re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn embedded_chsh_matches_the_povm_value() {
        let (game, strat) = crate::games::builtin::chsh();
        let expect = crate::games::value::strategy_value(&game, &strat, &TOL).unwrap();
        let (qgame, qstrat) = embed_classical(&game, &strat, &TOL).unwrap();
        let got = crate::games::quantum::run_quantum_game(&qgame, &qstrat, &TOL).unwrap();
        assert!((got - expect).abs() < 1e-9, "embedded {got} vs direct {expect}");
    }

    #[test]
    fn embedded_always_win_game_accepts() {
        use crate::games::classical::{ClassicalGame, PiSpec};
        let game = ClassicalGame::new("sure", 1, (2, 2, 2, 2), PiSpec::Uniform, |_| true).unwrap();
        let (_, strat) = crate::games::builtin::chsh();
        let (qgame, qstrat) = embed_classical(&game, &strat, &TOL).unwrap();
        let got = crate::games::quantum::run_quantum_game(&qgame, &qstrat, &TOL).unwrap();
        assert!((got - 1.0).abs() < 1e-9);
    }

    #[test]
    fn embedded_magic_square_wins_with_certainty() {
        let (game, strat) = crate::games::builtin::magic_square();
        let (qgame, qstrat) = embed_classical(&game, &strat, &TOL).unwrap();
        let got = crate::games::quantum::run_quantum_game(&qgame, &qstrat, &TOL).unwrap();
        assert!((got - 1.0).abs() < 1e-9, "embedded value {got}");
    }

    #[test]
    fn embedding_a_two_round_game_preserves_value() {
        use crate::games::classical::{ClassicalGame, PiSpec};
        use crate::games::strategy::{PovmBook, PovmStrategy};
        use crate::qlin::gates;

        // two rounds of CHSH-style play with the second-round predicate
        // flipped; measurements reuse the one-round bases per round
        let game = ClassicalGame::new("double", 2, (2, 2, 2, 2), PiSpec::Uniform, |h| {
            let first = (h.a[0] ^ h.b[0]) == (h.s[0] & h.t[0]);
            let second = (h.a[1] ^ h.b[1]) != (h.s[1] & h.t[1]);
            first && second
        })
        .unwrap();

        let alice_angles = [0.0, std::f64::consts::FRAC_PI_4];
        let bob_angles = [std::f64::consts::FRAC_PI_8, -std::f64::consts::FRAC_PI_8];
        let mut alice = PovmBook::new();
        let mut bob = PovmBook::new();
        for q1 in 0..2u16 {
            alice.insert(
                OwnView { questions: vec![q1], answers: vec![] },
                crate::games::builtin::rotated_measurement(alice_angles[q1 as usize]),
            );
            bob.insert(
                OwnView { questions: vec![q1], answers: vec![] },
                crate::games::builtin::rotated_measurement(bob_angles[q1 as usize]),
            );
            for a1 in 0..2u16 {
                for q2 in 0..2u16 {
                    alice.insert(
                        OwnView { questions: vec![q1, q2], answers: vec![a1] },
                        crate::games::builtin::rotated_measurement(alice_angles[q2 as usize]),
                    );
                    bob.insert(
                        OwnView { questions: vec![q1, q2], answers: vec![a1] },
                        crate::games::builtin::rotated_measurement(bob_angles[q2 as usize]),
                    );
                }
            }
        }
        let strat = PovmStrategy::new(gates::epr(), alice, bob).unwrap();
        let expect = crate::games::value::strategy_value(&game, &strat, &TOL).unwrap();
        let (qgame, qstrat) = embed_classical(&game, &strat, &TOL).unwrap();
        let got = crate::games::quantum::run_quantum_game(&qgame, &qstrat, &TOL).unwrap();
        assert!((got - expect).abs() < 1e-9, "embedded {got} vs direct {expect}");
    }
}
