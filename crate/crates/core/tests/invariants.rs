//! Cross-module invariants: route agreement between independent evaluation
//! paths, symmetry properties, and the distribution-level view of strategy
//! compilation.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use embezzlab::config::{Tolerances, DEFAULT_DENSE_CAP};
use embezzlab::embezzle::{embezzled_version, harmonic_norm, select_top_products};
use embezzlab::games::{
    self, run_quantum_game_with_state, strategy_value, strategy_value_product, ClassicalGame,
    History, OwnView, PiSpec, PovmBook, PovmStrategy,
};
use embezzlab::qlin::random::{random_povm, random_state, random_unitary};
use embezzlab::qlin::{
    overlap, schmidt_decompose, tensor, trace_distance_pure, tv_distance, CMatrix, StateVector,
};
use embezzlab::transform::{compile_circuit, lift_circuit};

const TOL: Tolerances = Tolerances::DEFAULT;

fn random_one_round_game(rng: &mut ChaCha8Rng, sizes: (usize, usize, usize, usize)) -> ClassicalGame {
    let table: Vec<bool> = (0..sizes.0 * sizes.1 * sizes.2 * sizes.3)
        .map(|_| rng.gen::<bool>())
        .collect();
    let (_, t, a, b) = sizes;
    ClassicalGame::new("random", 1, sizes, PiSpec::Uniform, move |h| {
        let idx = ((h.s[0] as usize * t + h.t[0] as usize) * a + h.a[0] as usize) * b
            + h.b[0] as usize;
        table[idx]
    })
    .unwrap()
}

fn random_strategy(
    rng: &mut ChaCha8Rng,
    game: &ClassicalGame,
    m: u32,
) -> PovmStrategy {
    let dim = 1usize << m;
    let shared = random_state(2 * m, rng);
    let mut alice = PovmBook::new();
    for s in 0..game.s_size() as u16 {
        alice.insert(
            OwnView { questions: vec![s], answers: vec![] },
            random_povm(dim, game.a_size(), rng),
        );
    }
    let mut bob = PovmBook::new();
    for t in 0..game.t_size() as u16 {
        bob.insert(
            OwnView { questions: vec![t], answers: vec![] },
            random_povm(dim, game.b_size(), rng),
        );
    }
    PovmStrategy::new(shared, alice, bob).unwrap()
}

#[test]
fn recursion_and_product_form_agree_on_random_games() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for trial in 0..8 {
        let game = random_one_round_game(&mut rng, (2, 2, 2, 2));
        let strat = random_strategy(&mut rng, &game, 1);
        let recursive = strategy_value(&game, &strat, &TOL).unwrap();
        let product = strategy_value_product(&game, &strat, &TOL).unwrap();
        assert!(
            (recursive - product).abs() < 1e-9,
            "trial {trial}: {recursive} vs {product}"
        );
        assert!((0.0..=1.0 + 1e-9).contains(&recursive));
    }
}

#[test]
fn answer_probabilities_sum_to_one_for_every_question_pair() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let game = random_one_round_game(&mut rng, (2, 3, 2, 2));
    let strat = random_strategy(&mut rng, &game, 1);
    for s in 0..game.s_size() as u16 {
        for t in 0..game.t_size() as u16 {
            let alice = strat.alice.get(&OwnView { questions: vec![s], answers: vec![] }).unwrap();
            let bob = strat.bob.get(&OwnView { questions: vec![t], answers: vec![] }).unwrap();
            let mut total = 0.0;
            for a in 0..game.a_size() {
                for b in 0..game.b_size() {
                    let moved = strat
                        .shared_state()
                        .apply_right(bob.element(b), 1)
                        .apply_left(alice.element(a), 1);
                    total += moved.norm_sqr();
                }
            }
            assert!((total - 1.0).abs() < 1e-9, "questions ({s},{t}): mass {total}");
        }
    }
}

#[test]
fn strategy_value_is_invariant_under_local_unitaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let (game, strat) = games::chsh();
    let before = strategy_value(&game, &strat, &TOL).unwrap();

    let u_a = random_unitary(2, &mut rng);
    let u_b = random_unitary(2, &mut rng);
    let rotated_state = strat
        .shared_state()
        .apply_left(&u_a, 1)
        .apply_right(&u_b, 1);
    // conjugate each side's POVMs by its own unitary
    let alice = strat.alice.map_elements(|m| u_a.mul(&m.mul(&u_a.dagger()))).unwrap();
    let bob = strat.bob.map_elements(|m| u_b.mul(&m.mul(&u_b.dagger()))).unwrap();
    let rotated = PovmStrategy::new(rotated_state, alice, bob).unwrap();
    let after = strategy_value(&game, &rotated, &TOL).unwrap();
    assert!((before - after).abs() < 1e-9, "{before} vs {after}");
}

/// The compiled strategy's run equals the lifted strategy's run started at
/// the embezzled version, and the verifier's readout distributions of the
/// two lifted runs differ by at most the trace distance of their
/// pre-measurement states, itself at most sqrt(2 epsilon).
#[test]
fn compiled_run_is_the_lifted_run_on_the_embezzled_version() {
    let (game, strat) = games::chsh_circuit_game();
    let epsilon = 0.25;
    let compiled = compile_circuit(&strat, 1, 1, epsilon, DEFAULT_DENSE_CAP, &TOL).unwrap();
    let lifted = lift_circuit(&strat, 1, 1, compiled.n, DEFAULT_DENSE_CAP, &TOL).unwrap();

    let source = schmidt_decompose(&strat.shared_state, 1, &TOL).unwrap();
    let version = embezzled_version(&source, compiled.n).unwrap();
    let embezzled = version.dense_bipartite(DEFAULT_DENSE_CAP).unwrap();
    let lifted_at_e = games::CircuitStrategy {
        shared_state: embezzled,
        ..lifted.clone()
    };

    let (p_reference, phi_reference) =
        run_quantum_game_with_state(&game, &lifted, &TOL).unwrap();
    let (p_embezzled, phi_embezzled) =
        run_quantum_game_with_state(&game, &lifted_at_e, &TOL).unwrap();
    let (p_compiled, _) =
        run_quantum_game_with_state(&game, &compiled.strategy, &TOL).unwrap();

    // the conjugating unitaries act on prover privates only, so the readout
    // statistics match the embezzled-version run exactly
    assert!(
        (p_compiled - p_embezzled).abs() < 1e-9,
        "compiled {p_compiled} vs embezzled-run {p_embezzled}"
    );

    // unitarity carries the initial-state overlap through the full run
    let fidelity = version.fidelity();
    let ov = overlap(&phi_reference, &phi_embezzled).unwrap().norm();
    assert!((ov - fidelity).abs() < 1e-9, "overlap {ov} vs fidelity {fidelity}");

    let readout_tv = tv_distance(
        &[p_reference, 1.0 - p_reference],
        &[p_embezzled, 1.0 - p_embezzled],
        &TOL,
    )
    .unwrap();
    let state_distance = trace_distance_pure(&phi_reference, &phi_embezzled).unwrap();
    assert!(readout_tv <= state_distance + 1e-9);
    assert!(state_distance <= (2.0 * epsilon).sqrt() + 1e-9);
}

#[test]
fn lifted_chsh_value_is_bitwise_reproducible() {
    // deterministic reduction order: two runs agree exactly
    let (game, strat) = games::chsh();
    let first = strategy_value(&game, &strat, &TOL).unwrap();
    let second = strategy_value(&game, &strat, &TOL).unwrap();
    assert_eq!(first.to_bits(), second.to_bits());
}

fn normalized_state(parts: Vec<(f64, f64)>) -> StateVector {
    StateVector::normalized(
        parts
            .into_iter()
            .map(|(re, im)| num_complex::Complex64::new(re, im))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_norm_is_multiplicative(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        prop_assume!(a.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3));
        prop_assume!(b.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3));
        let a = normalized_state(a);
        let b = normalized_state(b);
        let product = tensor(&a, &b);
        prop_assert!((product.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_is_associative(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2),
        c in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
    ) {
        prop_assume!(a.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3));
        prop_assume!(b.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3));
        prop_assume!(c.iter().any(|(re, im)| re.abs() + im.abs() > 1e-3));
        let a = normalized_state(a);
        let b = normalized_state(b);
        let c = normalized_state(c);
        let left = tensor(&tensor(&a, &b), &c);
        let right = tensor(&a, &tensor(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn schmidt_reconstruction_round_trips(
        amps in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
        split in 1u32..4,
    ) {
        prop_assume!(amps.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-4);
        let state = normalized_state(amps);
        let dec = schmidt_decompose(&state, split, &TOL).unwrap();
        prop_assert!(dec.reconstruct().euclidean_distance(&state) < 1e-9);
        let mass: f64 = dec.coefficients().iter().map(|c| c * c).sum();
        prop_assert!((mass - 1.0).abs() < 1e-10);
    }

    #[test]
    fn top_product_selection_matches_the_dense_grid(
        raw in proptest::collection::vec(1e-3f64..1.0, 1..=8),
        n in 1u32..=5,
    ) {
        let mut alpha = raw;
        let norm: f64 = alpha.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in alpha.iter_mut() {
            *x /= norm;
        }
        alpha.sort_by(|x, y| y.partial_cmp(x).unwrap());

        let selection = select_top_products(&alpha, n);
        let c = harmonic_norm(n).unwrap();
        let mut grid: Vec<f64> = Vec::new();
        for j in 1..=(1u64 << n) {
            for a in &alpha {
                grid.push(a / (c * (j as f64).sqrt()));
            }
        }
        grid.sort_by(|x, y| y.partial_cmp(x).unwrap());
        grid.truncate(1 << n);
        for (got, want) in selection.gammas().iter().zip(&grid) {
            prop_assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_statistics_respect_the_trace_distance(
        a in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        b in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 4),
        seed in 0u64..1000,
    ) {
        prop_assume!(a.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-4);
        prop_assume!(b.iter().map(|(re, im)| re * re + im * im).sum::<f64>() > 1e-4);
        let a = normalized_state(a);
        let b = normalized_state(b);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let povm = random_povm(4, 3, &mut rng);
        let pa = embezzlab::qlin::measure(&povm, &a, &TOL).unwrap().probabilities;
        let pb = embezzlab::qlin::measure(&povm, &b, &TOL).unwrap().probabilities;
        let tv = tv_distance(&pa, &pb, &TOL).unwrap();
        let trace = trace_distance_pure(&a, &b).unwrap();
        prop_assert!(tv <= trace + 1e-9);
    }
}

// The winning-set materialization and pi validation reject malformed games.
#[test]
fn game_validation_rejects_bad_inputs() {
    assert!(ClassicalGame::new("none", 0, (2, 2, 2, 2), PiSpec::Uniform, |_| true).is_err());
    let game = ClassicalGame::new("g", 1, (2, 2, 2, 2), PiSpec::Uniform, |_| false).unwrap();
    assert!(game.winning_set().is_empty());
    assert!(!game.wins(&History {
        s: vec![0],
        t: vec![0],
        a: vec![0],
        b: vec![0]
    }));
    let value = embezzlab::games::classical_value(&game).unwrap();
    assert_eq!(value, 0.0);
}

// Strategy books reject wrong dimensions at construction.
#[test]
fn strategy_validation_rejects_dimension_mismatch() {
    let mut alice = PovmBook::new();
    alice.insert(
        OwnView { questions: vec![0], answers: vec![] },
        embezzlab::qlin::Povm::new(vec![CMatrix::identity(4), CMatrix::zeros(4, 4)]).unwrap(),
    );
    let out = PovmStrategy::new(StateVector::zero_state(2), alice, PovmBook::new());
    assert!(out.is_err());
}
