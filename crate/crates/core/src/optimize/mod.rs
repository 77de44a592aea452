//! See-saw ascent over fixed-dimension strategies for one-round binary games.
//!
//! Alternating updates, each one exactly optimal given the rest: every
//! question's projector becomes the nonnegative eigenspace of its effective
//! payoff operator (Alice, then Bob), and the shared state becomes the top
//! eigenvector of the full payoff operator. Every half-step is a restricted
//! maximization, so the value trace never decreases.

use rayon::prelude::*;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qlin::random::{random_projector, random_state};
use crate::qlin::{hermitian_eigen, nonnegative_eigenspace_projector, CMatrix, Povm, StateVector};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::games::{strategy_value, ClassicalGame, History, OwnView, PovmBook, PovmStrategy};

/// Eigenvalues above `-KERNEL_SLACK` count as part of the nonnegative
/// eigenspace when building projectors (the kernel is included; it carries
/// no payoff either way).
const KERNEL_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug)]
pub struct SeesawConfig {
    /// Qubits per side, `m`.
    pub side_qubits: u32,
    pub max_iters: usize,
    /// Stop once one full iteration improves the value by less than this.
    pub convergence_tol: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        SeesawConfig {
            side_qubits: 1,
            max_iters: 200,
            convergence_tol: 1e-10,
            seed: 0,
            restarts: 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeesawOutcome {
    pub best_strategy: PovmStrategy,
    pub best_value: f64,
    /// Index of the restart that produced the best value.
    pub best_restart: usize,
    /// Per-restart value traces; entry 0 is the starting value.
    pub traces: Vec<Vec<f64>>,
}

fn check_game_shape(game: &ClassicalGame) -> Result<()> {
    if game.rounds() != 1 {
        return Err(Error::UnsupportedGame(
            "see-saw handles one-round games only".into(),
        ));
    }
    if game.a_size() != 2 || game.b_size() != 2 {
        return Err(Error::UnsupportedGame(
            "see-saw handles binary answer alphabets only".into(),
        ));
    }
    Ok(())
}

fn wins(game: &ClassicalGame, s: u16, t: u16, a: u16, b: u16) -> bool {
    game.wins(&History { s: vec![s], t: vec![t], a: vec![a], b: vec![b] })
}

fn view(q: u16) -> OwnView {
    OwnView { questions: vec![q], answers: Vec::new() }
}

/// One full see-saw iteration: Alice, Bob, then the shared state.
pub fn seesaw_step(
    game: &ClassicalGame,
    strat: &PovmStrategy,
    tol: &Tolerances,
) -> Result<PovmStrategy> {
    check_game_shape(game)?;
    let m = strat.side_qubits();
    let dim = 1usize << m;
    let pi = game.pi(0, &History::default())?;
    let weight = |s: u16, t: u16| pi[s as usize * game.t_size() + t as usize];
    let psi = strat.shared_state().as_matrix(m);

    // Alice: per question, the payoff difference operator traced over Bob
    let mut alice = PovmBook::new();
    for s in 0..game.s_size() as u16 {
        let mut delta_remote = CMatrix::zeros(dim, dim);
        for t in 0..game.t_size() as u16 {
            let bob = strat.bob.get(&view(t))?;
            for b in 0..2u16 {
                for a in 0..2u16 {
                    if wins(game, s, t, a, b) {
                        let sign = if a == 0 { 1.0 } else { -1.0 };
                        let w = weight(s, t) * sign;
                        delta_remote = delta_remote
                            .add(&bob.element(b as usize).scale(num_complex::Complex64::new(w, 0.0)));
                    }
                }
            }
        }
        // E = Psi R^T Psi^dag is Hermitian for Hermitian R
        let delta = psi.mul(&delta_remote.transpose()).mul(&psi.dagger());
        let p = nonnegative_eigenspace_projector(&delta, KERNEL_SLACK);
        alice.insert(view(s), Povm::binary_projective(p)?);
    }

    // Bob: symmetric, with Alice's fresh projectors
    let mut bob = PovmBook::new();
    for t in 0..game.t_size() as u16 {
        let mut delta_remote = CMatrix::zeros(dim, dim);
        for s in 0..game.s_size() as u16 {
            let alice_povm = alice.get(&view(s))?;
            for a in 0..2u16 {
                for b in 0..2u16 {
                    if wins(game, s, t, a, b) {
                        let sign = if b == 0 { 1.0 } else { -1.0 };
                        let w = weight(s, t) * sign;
                        delta_remote = delta_remote.add(
                            &alice_povm
                                .element(a as usize)
                                .scale(num_complex::Complex64::new(w, 0.0)),
                        );
                    }
                }
            }
        }
        // F = Psi^T L^T conj(Psi) is the Bob-side effective operator
        let delta = psi.transpose().mul(&delta_remote.transpose()).mul(&psi.conj());
        let p = nonnegative_eigenspace_projector(&delta, KERNEL_SLACK);
        bob.insert(view(t), Povm::binary_projective(p)?);
    }

    // state: top eigenvector of the full payoff operator
    let joint_dim = dim * dim;
    let mut payoff = CMatrix::zeros(joint_dim, joint_dim);
    for s in 0..game.s_size() as u16 {
        let alice_povm = alice.get(&view(s))?;
        for t in 0..game.t_size() as u16 {
            let bob_povm = bob.get(&view(t))?;
            for a in 0..2u16 {
                for b in 0..2u16 {
                    if wins(game, s, t, a, b) {
                        let term = alice_povm
                            .element(a as usize)
                            .kron(bob_povm.element(b as usize))
                            .scale(num_complex::Complex64::new(weight(s, t), 0.0));
                        payoff = payoff.add(&term);
                    }
                }
            }
        }
    }
    let (_, vecs) = hermitian_eigen(&payoff);
    let top: Vec<num_complex::Complex64> = (0..joint_dim).map(|i| vecs.get(i, 0)).collect();
    let shared = StateVector::normalized(top)?;

    let next = PovmStrategy::new(shared, alice, bob)?;
    next.validate(tol)?;
    Ok(next)
}

fn random_strategy(game: &ClassicalGame, m: u32, rng: &mut ChaCha8Rng) -> Result<PovmStrategy> {
    let dim = 1usize << m;
    let shared = random_state(2 * m, rng);
    let mut alice = PovmBook::new();
    for s in 0..game.s_size() as u16 {
        alice.insert(view(s), Povm::binary_projective(random_projector(dim, rng))?);
    }
    let mut bob = PovmBook::new();
    for t in 0..game.t_size() as u16 {
        bob.insert(view(t), Povm::binary_projective(random_projector(dim, rng))?);
    }
    PovmStrategy::new(shared, alice, bob)
}

/// Runs `restarts` independent see-saw ascents from seeded random strategies
/// and reports the best, with the full value trace of every restart.
pub fn seesaw(
    game: &ClassicalGame,
    cfg: &SeesawConfig,
    tol: &Tolerances,
) -> Result<SeesawOutcome> {
    check_game_shape(game)?;
    if cfg.restarts == 0 || cfg.convergence_tol <= 0.0 || cfg.side_qubits == 0 {
        return Err(Error::UnsupportedGame(
            "see-saw needs restarts >= 1, tol > 0, m >= 1".into(),
        ));
    }
    let runs: Vec<Result<(PovmStrategy, Vec<f64>)>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(
                cfg.seed.wrapping_add((restart as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
            );
            let mut strat = random_strategy(game, cfg.side_qubits, &mut rng)?;
            let mut trace = vec![strategy_value(game, &strat, tol)?];
            for _ in 0..cfg.max_iters {
                strat = seesaw_step(game, &strat, tol)?;
                let value = strategy_value(game, &strat, tol)?;
                let previous = *trace.last().expect("trace is seeded");
                trace.push(value);
                if value - previous < cfg.convergence_tol {
                    break;
                }
            }
            Ok((strat, trace))
        })
        .collect();

    let mut best: Option<(usize, PovmStrategy, f64)> = None;
    let mut traces = Vec::with_capacity(cfg.restarts);
    for (restart, run) in runs.into_iter().enumerate() {
        let (strat, trace) = run?;
        let value = *trace.last().expect("nonempty trace");
        traces.push(trace);
        let better = match &best {
            None => true,
            Some((_, _, current)) => value > *current,
        };
        if better {
            best = Some((restart, strat, value));
        }
    }
    let (best_restart, best_strategy, best_value) = best.expect("at least one restart");
    Ok(SeesawOutcome { best_strategy, best_value, best_restart, traces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::builtin::chsh;
    use crate::games::classical::PiSpec;

    const TOL: Tolerances = Tolerances::DEFAULT;
    const CHSH_OPTIMUM: f64 = 0.8535533905932737;

    #[test]
    fn seesaw_reaches_the_chsh_optimum() {
        let (game, _) = chsh();
        let cfg = SeesawConfig { restarts: 4, seed: 7, ..Default::default() };
        let outcome = seesaw(&game, &cfg, &TOL).unwrap();
        assert!(outcome.best_value >= CHSH_OPTIMUM - 1e-4, "best {}", outcome.best_value);
        for trace in &outcome.traces {
            for w in trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "trace decreased: {:?}", w);
            }
            assert!(*trace.last().unwrap() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn optimal_strategy_is_a_fixed_point() {
        let (game, strat) = chsh();
        let before = strategy_value(&game, &strat, &TOL).unwrap();
        let stepped = seesaw_step(&game, &strat, &TOL).unwrap();
        let after = strategy_value(&game, &stepped, &TOL).unwrap();
        assert!(after >= before - 1e-12);
        assert!((after - before).abs() < 1e-10, "step moved the optimum: {before} -> {after}");
    }

    #[test]
    fn always_win_game_converges_immediately() {
        let game = ClassicalGame::new("sure", 1, (2, 2, 2, 2), PiSpec::Uniform, |_| true).unwrap();
        let cfg = SeesawConfig { seed: 3, ..Default::default() };
        let outcome = seesaw(&game, &cfg, &TOL).unwrap();
        assert!((outcome.traces[0][0] - 1.0).abs() < 1e-10, "value 1 from the start");
        assert!((outcome.best_value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn output_strategies_are_valid_povms() {
        let (game, _) = chsh();
        let cfg = SeesawConfig { restarts: 2, seed: 11, max_iters: 30, ..Default::default() };
        let outcome = seesaw(&game, &cfg, &TOL).unwrap();
        outcome.best_strategy.validate(&TOL).unwrap();
    }

    #[test]
    fn multi_round_games_are_rejected() {
        let game =
            ClassicalGame::new("two", 2, (2, 2, 2, 2), PiSpec::Uniform, |_| true).unwrap();
        assert!(matches!(
            seesaw(&game, &SeesawConfig::default(), &TOL),
            Err(Error::UnsupportedGame(_))
        ));
    }
}
