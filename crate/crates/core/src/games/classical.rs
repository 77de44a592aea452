//! k-round two-prover games over finite question and answer sets.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};

/// Index-encoded transcript (possibly partial) of a game: questions and
/// answers per round, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct History {
    pub s: Vec<u16>,
    pub t: Vec<u16>,
    pub a: Vec<u16>,
    pub b: Vec<u16>,
}

impl History {
    pub fn with_questions(&self, s: u16, t: u16) -> History {
        let mut h = self.clone();
        h.s.push(s);
        h.t.push(t);
        h
    }

    pub fn with_answers(&self, a: u16, b: u16) -> History {
        let mut h = self.clone();
        h.a.push(a);
        h.b.push(b);
        h
    }

    /// Rounds fully played out.
    pub fn completed_rounds(&self) -> usize {
        self.a.len()
    }
}

/// One prover's view of the transcript: own questions received so far
/// (including the current round's) and own answers already given.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OwnView {
    pub questions: Vec<u16>,
    pub answers: Vec<u16>,
}

impl OwnView {
    pub fn alice(history: &History, current_question: u16) -> OwnView {
        let mut questions = history.s.clone();
        questions.push(current_question);
        OwnView { questions, answers: history.a.clone() }
    }

    pub fn bob(history: &History, current_question: u16) -> OwnView {
        let mut questions = history.t.clone();
        questions.push(current_question);
        OwnView { questions, answers: history.b.clone() }
    }
}

/// Per-round question distributions over `S x T`.
#[derive(Clone, Debug)]
pub enum PiSpec {
    /// Uniform over `S x T` at every round regardless of history.
    Uniform,
    /// One table per round, keyed by the history prefix before that round.
    /// Tables are row-major in `s`, so `table[s * |T| + t]`.
    Tables(Vec<HashMap<History, Vec<f64>>>),
}

/// A k-round game: alphabet sizes, question distributions, and the winning
/// predicate held as the set of accepted complete transcripts.
#[derive(Clone, Debug)]
pub struct ClassicalGame {
    pub name: String,
    rounds: u32,
    s_size: usize,
    t_size: usize,
    a_size: usize,
    b_size: usize,
    pi: PiSpec,
    winning: HashSet<History>,
}

/// Histories materialized per game may not exceed this.
const PREDICATE_CAP: u128 = 1 << 22;

impl ClassicalGame {
    /// Builds a game by materializing the predicate over all complete
    /// transcripts; the predicate receives an index-encoded history.
    pub fn new(
        name: impl Into<String>,
        rounds: u32,
        sizes: (usize, usize, usize, usize),
        pi: PiSpec,
        predicate: impl Fn(&History) -> bool,
    ) -> Result<Self> {
        let (s_size, t_size, a_size, b_size) = sizes;
        if rounds == 0 || s_size == 0 || t_size == 0 || a_size == 0 || b_size == 0 {
            return Err(Error::InvalidGame("empty alphabet or zero rounds".into()));
        }
        let per_round = (s_size as u128) * (t_size as u128) * (a_size as u128) * (b_size as u128);
        let total = per_round
            .checked_pow(rounds)
            .filter(|&n| n <= PREDICATE_CAP)
            .ok_or(Error::SearchCapExceeded { size: per_round, cap: PREDICATE_CAP })?;
        let _ = total;

        let mut winning = HashSet::new();
        let mut history = History::default();
        enumerate_histories(
            rounds as usize,
            (s_size, t_size, a_size, b_size),
            &mut history,
            &mut |h| {
                if predicate(h) {
                    winning.insert(h.clone());
                }
            },
        );
        let game = ClassicalGame {
            name: name.into(),
            rounds,
            s_size,
            t_size,
            a_size,
            b_size,
            pi,
            winning,
        };
        game.validate_pi()?;
        Ok(game)
    }

    /// Builds a game directly from its winning-transcript set.
    pub fn from_winning_set(
        name: impl Into<String>,
        rounds: u32,
        sizes: (usize, usize, usize, usize),
        pi: PiSpec,
        winning: HashSet<History>,
    ) -> Result<Self> {
        let (s_size, t_size, a_size, b_size) = sizes;
        let game = ClassicalGame {
            name: name.into(),
            rounds,
            s_size,
            t_size,
            a_size,
            b_size,
            pi,
            winning,
        };
        game.validate_pi()?;
        Ok(game)
    }

    fn validate_pi(&self) -> Result<()> {
        match &self.pi {
            PiSpec::Uniform => Ok(()),
            PiSpec::Tables(tables) => {
                if tables.len() != self.rounds as usize {
                    return Err(Error::InvalidGame(format!(
                        "{} question tables for {} rounds",
                        tables.len(),
                        self.rounds
                    )));
                }
                for (round, table) in tables.iter().enumerate() {
                    for (prefix, probs) in table {
                        if prefix.completed_rounds() != round || prefix.s.len() != round {
                            return Err(Error::InvalidGame(format!(
                                "round-{round} table keyed by a prefix of the wrong length"
                            )));
                        }
                        if probs.len() != self.s_size * self.t_size {
                            return Err(Error::InvalidGame(format!(
                                "round-{round} table row has {} entries, expected {}",
                                probs.len(),
                                self.s_size * self.t_size
                            )));
                        }
                        let sum: f64 = probs.iter().sum();
                        if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                            return Err(Error::InvalidGame(format!(
                                "round-{round} distribution sums to {sum}"
                            )));
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn s_size(&self) -> usize {
        self.s_size
    }

    pub fn t_size(&self) -> usize {
        self.t_size
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    /// Question distribution for the given round (0-based) after the given
    /// prefix; row-major in `s`.
    pub fn pi(&self, round: usize, prefix: &History) -> Result<Vec<f64>> {
        match &self.pi {
            PiSpec::Uniform => {
                let cells = self.s_size * self.t_size;
                Ok(vec![1.0 / cells as f64; cells])
            }
            PiSpec::Tables(tables) => tables
                .get(round)
                .and_then(|t| t.get(prefix))
                .cloned()
                .ok_or_else(|| {
                    Error::InvalidGame(format!("no question distribution for round {round} prefix"))
                }),
        }
    }

    pub fn pi_spec(&self) -> &PiSpec {
        &self.pi
    }

    pub fn wins(&self, history: &History) -> bool {
        self.winning.contains(history)
    }

    pub fn winning_set(&self) -> &HashSet<History> {
        &self.winning
    }
}

fn enumerate_histories(
    rounds: usize,
    sizes: (usize, usize, usize, usize),
    history: &mut History,
    visit: &mut impl FnMut(&History),
) {
    if history.completed_rounds() == rounds {
        visit(history);
        return;
    }
    let (s_size, t_size, a_size, b_size) = sizes;
    for s in 0..s_size as u16 {
        for t in 0..t_size as u16 {
            history.s.push(s);
            history.t.push(t);
            for a in 0..a_size as u16 {
                for b in 0..b_size as u16 {
                    history.a.push(a);
                    history.b.push(b);
                    enumerate_histories(rounds, sizes, history, visit);
                    history.a.pop();
                    history.b.pop();
                }
            }
            history.s.pop();
            history.t.pop();
        }
    }
}
