//! Exact strategy values and the classical (deterministic) value.

use rayon::prelude::*;
use std::collections::HashMap;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qlin::{CMatrix, StateVector};

use super::classical::{ClassicalGame, History, OwnView};
use super::strategy::PovmStrategy;

/// Applies `x (x) y` to a bipartite state (`m` qubits per side). The right
/// factor goes first: it preserves the row sparsity of states supported on
/// few Alice indices, which the multiply kernel then exploits.
fn apply_pair(state: &StateVector, x: &CMatrix, y: &CMatrix, m: u32) -> StateVector {
    state.apply_right(y, m).apply_left(x, m)
}

/// Winning probability of a POVM strategy, by exact enumeration of the game
/// tree: at each round the answer probability is the squared norm of the
/// measured branch and the post-state is the branch renormalized to unit
/// length. Branches below the pruning tolerance are dropped.
pub fn strategy_value(
    game: &ClassicalGame,
    strat: &PovmStrategy,
    tol: &Tolerances,
) -> Result<f64> {
    let m = strat.side_qubits();
    let root = History::default();
    let pi = game.pi(0, &root)?;
    let pairs: Vec<(u16, u16)> = (0..game.s_size() as u16)
        .flat_map(|s| (0..game.t_size() as u16).map(move |t| (s, t)))
        .collect();
    let contributions: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(s, t)| {
            let weight = pi[s as usize * game.t_size() + t as usize];
            if weight == 0.0 {
                return Ok(0.0);
            }
            question_branch(game, strat, m, strat.shared_state(), &root, s, t, weight, tol)
        })
        .collect();
    let mut total = 0.0;
    for c in contributions {
        total += c?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn question_branch(
    game: &ClassicalGame,
    strat: &PovmStrategy,
    m: u32,
    state: &StateVector,
    history: &History,
    s: u16,
    t: u16,
    weight: f64,
    tol: &Tolerances,
) -> Result<f64> {
    let alice_povm = strat.alice.get(&OwnView::alice(history, s))?;
    let bob_povm = strat.bob.get(&OwnView::bob(history, t))?;
    if alice_povm.outcomes() != game.a_size() || bob_povm.outcomes() != game.b_size() {
        return Err(Error::InvalidStrategy(
            "POVM outcome count does not match the answer alphabet".into(),
        ));
    }
    let with_questions = history.with_questions(s, t);
    let round = with_questions.completed_rounds();
    let last_round = round + 1 == game.rounds() as usize;

    let mut total = 0.0;
    for a in 0..game.a_size() as u16 {
        let x = alice_povm.element(a as usize);
        for b in 0..game.b_size() as u16 {
            let y = bob_povm.element(b as usize);
            let branch = apply_pair(state, x, y, m);
            let prob = branch.norm_sqr();
            if prob < tol.prune {
                continue;
            }
            let next_history = with_questions.with_answers(a, b);
            if last_round {
                if game.wins(&next_history) {
                    total += weight * prob;
                }
                continue;
            }
            let scale = 1.0 / prob.sqrt();
            let post = StateVector::normalized(
                branch.amplitudes().iter().map(|z| z * scale).collect(),
            )?;
            let pi = game.pi(round + 1, &next_history)?;
            for s2 in 0..game.s_size() as u16 {
                for t2 in 0..game.t_size() as u16 {
                    let w = pi[s2 as usize * game.t_size() + t2 as usize];
                    if w == 0.0 {
                        continue;
                    }
                    total += question_branch(
                        game,
                        strat,
                        m,
                        &post,
                        &next_history,
                        s2,
                        t2,
                        weight * prob * w,
                        tol,
                    )?;
                }
            }
        }
    }
    Ok(total)
}

/// The same value written as a closed function of the initial state: one
/// operator product per winning transcript, no intermediate renormalization.
/// Serves as the independent second route for the recursion above.
pub fn strategy_value_product(
    game: &ClassicalGame,
    strat: &PovmStrategy,
    _tol: &Tolerances,
) -> Result<f64> {
    let m = strat.side_qubits();
    let dim = 1usize << m;
    let mut total = 0.0;
    'history: for h in game.winning_set() {
        // product of the per-round question probabilities along this transcript
        let mut pi_product = 1.0;
        for round in 0..game.rounds() as usize {
            let prefix = History {
                s: h.s[..round].to_vec(),
                t: h.t[..round].to_vec(),
                a: h.a[..round].to_vec(),
                b: h.b[..round].to_vec(),
            };
            let pi = match game.pi(round, &prefix) {
                Ok(pi) => pi,
                Err(_) => continue 'history, // unreachable prefix
            };
            pi_product *= pi[h.s[round] as usize * game.t_size() + h.t[round] as usize];
            if pi_product == 0.0 {
                continue 'history;
            }
        }
        // operator products, first round applied first (rightmost factor)
        let mut op_a = CMatrix::identity(dim);
        let mut op_b = CMatrix::identity(dim);
        for round in 0..game.rounds() as usize {
            let prefix = History {
                s: h.s[..round].to_vec(),
                t: h.t[..round].to_vec(),
                a: h.a[..round].to_vec(),
                b: h.b[..round].to_vec(),
            };
            let alice = strat.alice.get(&OwnView::alice(&prefix, h.s[round]))?;
            let bob = strat.bob.get(&OwnView::bob(&prefix, h.t[round]))?;
            op_a = alice.element(h.a[round] as usize).mul(&op_a);
            op_b = bob.element(h.b[round] as usize).mul(&op_b);
        }
        let moved = apply_pair(strat.shared_state(), &op_a, &op_b, m);
        total += pi_product * moved.norm_sqr();
    }
    Ok(total)
}

/// Cap on the number of deterministic strategy pairs enumerated.
pub const DEFAULT_SEARCH_CAP: u128 = 1 << 24;

/// Maximum winning probability over deterministic, history-respecting prover
/// functions. Shared randomness is a convex mixture of these, so it cannot
/// exceed the maximum.
pub fn classical_value(game: &ClassicalGame) -> Result<f64> {
    classical_value_capped(game, DEFAULT_SEARCH_CAP)
}

pub fn classical_value_capped(game: &ClassicalGame, cap: u128) -> Result<f64> {
    let alice_views = reachable_views(game.rounds(), game.s_size(), game.a_size());
    let bob_views = reachable_views(game.rounds(), game.t_size(), game.b_size());
    let alice_count = (game.a_size() as u128)
        .checked_pow(alice_views.len() as u32)
        .ok_or(Error::SearchCapExceeded { size: u128::MAX, cap })?;
    let bob_count = (game.b_size() as u128)
        .checked_pow(bob_views.len() as u32)
        .ok_or(Error::SearchCapExceeded { size: u128::MAX, cap })?;
    let total = alice_count
        .checked_mul(bob_count)
        .ok_or(Error::SearchCapExceeded { size: u128::MAX, cap })?;
    if total > cap {
        return Err(Error::SearchCapExceeded { size: total, cap });
    }

    let alice_index: HashMap<OwnView, usize> = alice_views
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();
    let bob_index: HashMap<OwnView, usize> = bob_views
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, v)| (v, i))
        .collect();

    // enumerate Alice assignments in the outer loop, Bob in the inner, both
    // as mixed-radix counters; evaluate each with exact question weights
    let mut best: f64 = 0.0;
    let mut alice_assign = vec![0u16; alice_views.len()];
    loop {
        let mut bob_assign = vec![0u16; bob_views.len()];
        loop {
            let value = deterministic_value(
                game,
                &alice_index,
                &alice_assign,
                &bob_index,
                &bob_assign,
            )?;
            best = best.max(value);
            if !increment(&mut bob_assign, game.b_size() as u16) {
                break;
            }
        }
        if !increment(&mut alice_assign, game.a_size() as u16) {
            break;
        }
    }
    Ok(best)
}

fn increment(digits: &mut [u16], radix: u16) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < radix {
            return true;
        }
        *d = 0;
    }
    false
}

fn reachable_views(rounds: u32, questions: usize, answers: usize) -> Vec<OwnView> {
    let mut views = Vec::new();
    let mut frontier = vec![OwnView { questions: Vec::new(), answers: Vec::new() }];
    for _ in 0..rounds {
        let mut next = Vec::new();
        for base in frontier {
            for q in 0..questions as u16 {
                let mut view = base.clone();
                view.questions.push(q);
                views.push(view.clone());
                for ans in 0..answers as u16 {
                    let mut advanced = view.clone();
                    advanced.answers.push(ans);
                    next.push(advanced);
                }
            }
        }
        frontier = next;
    }
    views
}

fn deterministic_value(
    game: &ClassicalGame,
    alice_index: &HashMap<OwnView, usize>,
    alice_assign: &[u16],
    bob_index: &HashMap<OwnView, usize>,
    bob_assign: &[u16],
) -> Result<f64> {
    fn recurse(
        game: &ClassicalGame,
        alice_index: &HashMap<OwnView, usize>,
        alice_assign: &[u16],
        bob_index: &HashMap<OwnView, usize>,
        bob_assign: &[u16],
        history: &History,
        weight: f64,
    ) -> Result<f64> {
        let round = history.completed_rounds();
        if round == game.rounds() as usize {
            return Ok(if game.wins(history) { weight } else { 0.0 });
        }
        let pi = game.pi(round, history)?;
        let mut total = 0.0;
        for s in 0..game.s_size() as u16 {
            for t in 0..game.t_size() as u16 {
                let w = pi[s as usize * game.t_size() + t as usize];
                if w == 0.0 {
                    continue;
                }
                let a = alice_assign[alice_index[&OwnView::alice(history, s)]];
                let b = bob_assign[bob_index[&OwnView::bob(history, t)]];
                let next = history.with_questions(s, t).with_answers(a, b);
                total += recurse(
                    game,
                    alice_index,
                    alice_assign,
                    bob_index,
                    bob_assign,
                    &next,
                    weight * w,
                )?;
            }
        }
        Ok(total)
    }
    recurse(
        game,
        alice_index,
        alice_assign,
        bob_index,
        bob_assign,
        &History::default(),
        1.0,
    )
}
