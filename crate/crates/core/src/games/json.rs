//! File format for classical games and serialized strategies.
//!
//! A game document looks like:
//!
//! ```json
//! {
//!   "rounds": 1,
//!   "S": ["0", "1"], "T": ["0", "1"], "A": ["0", "1"], "B": ["0", "1"],
//!   "pi": "uniform",
//!   "predicate": { "expr": "(a1 ^ b1) == (s1 & t1)" }
//! }
//! ```
//!
//! `pi` is either the string `"uniform"` or a list with one entry per round;
//! each entry maps a history key to a row-major `|S| x |T|` probability
//! table. History keys are four semicolon-separated comma lists of 0-based
//! indices, `"s;t;a;b"` (empty for round one, e.g. `";;;"`; a round-two key
//! looks like `"0;1;1;0"`).
//!
//! `predicate` is either `{ "wins": ["s;t;a;b", ...] }` listing the winning
//! transcripts over full index sequences (`"0,1;1,0;0,0;1,1"` for two
//! rounds), or `{ "expr": ... }` with a boolean expression over the
//! variables `s1..sk`, `t1..tk`, `a1..ak`, `b1..bk` (values are 0-based
//! indices), integer literals, parentheses, and the operators
//! `! & | ^ == !=` plus comparisons `< <= > >=`.
//!
//! Strategies serialize matrices in row-major `[re, im]` pairs.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::classical::{ClassicalGame, History, PiSpec};

#[derive(Serialize, Deserialize)]
struct GameDoc {
    rounds: u32,
    #[serde(rename = "S")]
    s: Vec<String>,
    #[serde(rename = "T")]
    t: Vec<String>,
    #[serde(rename = "A")]
    a: Vec<String>,
    #[serde(rename = "B")]
    b: Vec<String>,
    pi: PiDoc,
    predicate: PredicateDoc,
    #[serde(default)]
    name: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PiDoc {
    Keyword(String),
    Tables(Vec<HashMap<String, Vec<f64>>>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PredicateDoc {
    Wins { wins: Vec<String> },
    Expr { expr: String },
}

fn parse_index_list(text: &str) -> Result<Vec<u16>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<u16>()
                .map_err(|e| Error::Parse(format!("bad index '{part}': {e}")))
        })
        .collect()
}

/// Parses a `"s;t;a;b"` history key.
pub fn parse_history_key(key: &str) -> Result<History> {
    let parts: Vec<&str> = key.split(';').collect();
    if parts.len() != 4 {
        return Err(Error::Parse(format!(
            "history key '{key}' must have four ';'-separated fields"
        )));
    }
    Ok(History {
        s: parse_index_list(parts[0])?,
        t: parse_index_list(parts[1])?,
        a: parse_index_list(parts[2])?,
        b: parse_index_list(parts[3])?,
    })
}

fn format_index_list(list: &[u16]) -> String {
    list.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_history_key(h: &History) -> String {
    format!(
        "{};{};{};{}",
        format_index_list(&h.s),
        format_index_list(&h.t),
        format_index_list(&h.a),
        format_index_list(&h.b)
    )
}

/// Reads a classical game from its JSON document.
pub fn game_from_json(text: &str) -> Result<ClassicalGame> {
    let doc: GameDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let sizes = (doc.s.len(), doc.t.len(), doc.a.len(), doc.b.len());
    let name = doc.name.unwrap_or_else(|| "game".to_string());

    let pi = match doc.pi {
        PiDoc::Keyword(word) if word == "uniform" => PiSpec::Uniform,
        PiDoc::Keyword(word) => {
            return Err(Error::Parse(format!("unknown pi keyword '{word}'")));
        }
        PiDoc::Tables(tables) => {
            let mut parsed = Vec::with_capacity(tables.len());
            for table in tables {
                let mut round_table = HashMap::new();
                for (key, probs) in table {
                    round_table.insert(parse_history_key(&key)?, probs);
                }
                parsed.push(round_table);
            }
            PiSpec::Tables(parsed)
        }
    };

    match doc.predicate {
        PredicateDoc::Wins { wins } => {
            let mut set = HashSet::new();
            for key in wins {
                set.insert(parse_history_key(&key)?);
            }
            ClassicalGame::from_winning_set(name, doc.rounds, sizes, pi, set)
        }
        PredicateDoc::Expr { expr } => {
            let parsed = expression::parse(&expr)?;
            ClassicalGame::new(name, doc.rounds, sizes, pi, |h| {
                expression::evaluate(&parsed, h) != 0
            })
        }
    }
}

/// Writes a classical game as its JSON document (predicate as a winning
/// list).
pub fn game_to_json(game: &ClassicalGame) -> Result<String> {
    let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    let pi = match game.pi_spec() {
        PiSpec::Uniform => PiDoc::Keyword("uniform".into()),
        PiSpec::Tables(tables) => PiDoc::Tables(
            tables
                .iter()
                .map(|t| {
                    t.iter()
                        .map(|(h, p)| (format_history_key(h), p.clone()))
                        .collect()
                })
                .collect(),
        ),
    };
    let mut wins: Vec<String> = game.winning_set().iter().map(format_history_key).collect();
    wins.sort();
    let doc = GameDoc {
        rounds: game.rounds(),
        s: labels(game.s_size()),
        t: labels(game.t_size()),
        a: labels(game.a_size()),
        b: labels(game.b_size()),
        pi,
        predicate: PredicateDoc::Wins { wins },
        name: Some(game.name.clone()),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
}

/// A small boolean/integer expression language over transcript variables.
pub mod expression {
    use super::super::classical::History;
    use crate::error::{Error, Result};

    #[derive(Clone, Debug, PartialEq)]
    pub enum Expr {
        Literal(i64),
        Var { register: char, round: usize },
        Not(Box<Expr>),
        Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
    }

    #[derive(Clone, Copy, Debug, PartialEq, Eq)]
    pub enum BinOp {
        And,
        Or,
        Xor,
        Eq,
        Ne,
        Lt,
        Le,
        Gt,
        Ge,
    }

    #[derive(Clone, Debug, PartialEq)]
    enum Token {
        Literal(i64),
        Var(char, usize),
        Op(BinOp),
        Not,
        Open,
        Close,
    }

    fn tokenize(text: &str) -> Result<Vec<Token>> {
        let bytes: Vec<char> = text.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                ' ' | '\t' | '\n' => i += 1,
                '(' => {
                    tokens.push(Token::Open);
                    i += 1;
                }
                ')' => {
                    tokens.push(Token::Close);
                    i += 1;
                }
                '!' if bytes.get(i + 1) == Some(&'=') => {
                    tokens.push(Token::Op(BinOp::Ne));
                    i += 2;
                }
                '!' => {
                    tokens.push(Token::Not);
                    i += 1;
                }
                '&' => {
                    tokens.push(Token::Op(BinOp::And));
                    i += 1;
                }
                '|' => {
                    tokens.push(Token::Op(BinOp::Or));
                    i += 1;
                }
                '^' => {
                    tokens.push(Token::Op(BinOp::Xor));
                    i += 1;
                }
                '=' if bytes.get(i + 1) == Some(&'=') => {
                    tokens.push(Token::Op(BinOp::Eq));
                    i += 2;
                }
                '<' if bytes.get(i + 1) == Some(&'=') => {
                    tokens.push(Token::Op(BinOp::Le));
                    i += 2;
                }
                '<' => {
                    tokens.push(Token::Op(BinOp::Lt));
                    i += 1;
                }
                '>' if bytes.get(i + 1) == Some(&'=') => {
                    tokens.push(Token::Op(BinOp::Ge));
                    i += 2;
                }
                '>' => {
                    tokens.push(Token::Op(BinOp::Gt));
                    i += 1;
                }
                '0'..='9' => {
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    let text: String = bytes[start..i].iter().collect();
                    tokens.push(Token::Literal(text.parse().unwrap()));
                }
                's' | 't' | 'a' | 'b' => {
                    let register = c;
                    i += 1;
                    let start = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    if start == i {
                        return Err(Error::Parse(format!(
                            "variable '{register}' needs a round number (s1, t2, ...)"
                        )));
                    }
                    let round: usize = bytes[start..i].iter().collect::<String>().parse().unwrap();
                    if round == 0 {
                        return Err(Error::Parse("rounds are numbered from 1".into()));
                    }
                    tokens.push(Token::Var(register, round - 1));
                }
                other => return Err(Error::Parse(format!("unexpected character '{other}'"))),
            }
        }
        Ok(tokens)
    }

    fn precedence(op: BinOp) -> u8 {
        match op {
            BinOp::Or => 1,
            BinOp::Xor => 2,
            BinOp::And => 3,
            BinOp::Eq | BinOp::Ne => 4,
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
        }
    }

    struct Parser {
        tokens: Vec<Token>,
        pos: usize,
    }

    impl Parser {
        fn peek(&self) -> Option<&Token> {
            self.tokens.get(self.pos)
        }

        fn next(&mut self) -> Option<Token> {
            let t = self.tokens.get(self.pos).cloned();
            if t.is_some() {
                self.pos += 1;
            }
            t
        }

        fn parse_atom(&mut self) -> Result<Expr> {
            match self.next() {
                Some(Token::Literal(v)) => Ok(Expr::Literal(v)),
                Some(Token::Var(register, round)) => Ok(Expr::Var { register, round }),
                Some(Token::Not) => Ok(Expr::Not(Box::new(self.parse_atom()?))),
                Some(Token::Open) => {
                    let inner = self.parse_binary(0)?;
                    match self.next() {
                        Some(Token::Close) => Ok(inner),
                        _ => Err(Error::Parse("missing closing parenthesis".into())),
                    }
                }
                other => Err(Error::Parse(format!("unexpected token {other:?}"))),
            }
        }

        fn parse_binary(&mut self, min_prec: u8) -> Result<Expr> {
            let mut lhs = self.parse_atom()?;
            while let Some(Token::Op(op)) = self.peek().cloned() {
                let prec = precedence(op);
                if prec < min_prec {
                    break;
                }
                self.next();
                let rhs = self.parse_binary(prec + 1)?;
                lhs = Expr::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) };
            }
            Ok(lhs)
        }
    }

    pub fn parse(text: &str) -> Result<Expr> {
        let mut parser = Parser { tokens: tokenize(text)?, pos: 0 };
        let expr = parser.parse_binary(0)?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse("trailing tokens in expression".into()));
        }
        Ok(expr)
    }

    /// Evaluates over a complete transcript; booleans are 0/1 integers.
    pub fn evaluate(expr: &Expr, h: &History) -> i64 {
        match expr {
            Expr::Literal(v) => *v,
            Expr::Var { register, round } => {
                let list = match register {
                    's' => &h.s,
                    't' => &h.t,
                    'a' => &h.a,
                    _ => &h.b,
                };
                list.get(*round).copied().unwrap_or(0) as i64
            }
            Expr::Not(inner) => i64::from(evaluate(inner, h) == 0),
            Expr::Binary { op, lhs, rhs } => {
                let l = evaluate(lhs, h);
                let r = evaluate(rhs, h);
                match op {
                    BinOp::And => l & r,
                    BinOp::Or => l | r,
                    BinOp::Xor => l ^ r,
                    BinOp::Eq => i64::from(l == r),
                    BinOp::Ne => i64::from(l != r),
                    BinOp::Lt => i64::from(l < r),
                    BinOp::Le => i64::from(l <= r),
                    BinOp::Gt => i64::from(l > r),
                    BinOp::Ge => i64::from(l >= r),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::games::builtin::chsh;
    use crate::games::value::{classical_value, strategy_value};

    const TOL: Tolerances = Tolerances::DEFAULT;

    const CHSH_JSON: &str = r#"{
        "rounds": 1,
        "S": ["0", "1"], "T": ["0", "1"], "A": ["0", "1"], "B": ["0", "1"],
        "pi": "uniform",
        "predicate": { "expr": "(a1 ^ b1) == (s1 & t1)" }
    }"#;

    #[test]
    fn chsh_from_expression_document() {
        let game = game_from_json(CHSH_JSON).unwrap();
        assert_eq!(game.winning_set().len(), 8);
        let value = classical_value(&game).unwrap();
        assert!((value - 0.75).abs() < 1e-15);
        // and the built-in optimal strategy plays identically on it
        let (_, strat) = chsh();
        let v = strategy_value(&game, &strat, &TOL).unwrap();
        assert!((v - 0.8535533905932737).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip_preserves_the_winning_set() {
        let (game, _) = chsh();
        let text = game_to_json(&game).unwrap();
        let back = game_from_json(&text).unwrap();
        assert_eq!(game.winning_set(), back.winning_set());
        assert_eq!(game.rounds(), back.rounds());
    }

    #[test]
    fn history_keys_round_trip() {
        let h = History { s: vec![0, 1], t: vec![1, 0], a: vec![1, 1], b: vec![0, 0] };
        let key = format_history_key(&h);
        assert_eq!(key, "0,1;1,0;1,1;0,0");
        assert_eq!(parse_history_key(&key).unwrap(), h);
        assert_eq!(parse_history_key(";;;").unwrap(), History::default());
    }

    #[test]
    fn expression_precedence_and_unary() {
        let h = History { s: vec![1], t: vec![1], a: vec![0], b: vec![1] };
        let e = expression::parse("a1 | b1 & s1").unwrap();
        // & binds tighter than |
        assert_eq!(expression::evaluate(&e, &h), 1);
        let e = expression::parse("!(a1 ^ b1)").unwrap();
        assert_eq!(expression::evaluate(&e, &h), 0);
        assert!(expression::parse("s0").is_err());
        assert!(expression::parse("q1").is_err());
    }

    #[test]
    fn table_pi_documents_parse() {
        let text = r#"{
            "rounds": 1,
            "S": ["0"], "T": ["0", "1"], "A": ["0"], "B": ["0"],
            "pi": [{";;;": [0.25, 0.75]}],
            "predicate": { "wins": ["0;0;0;0", "0;1;0;0"] }
        }"#;
        let game = game_from_json(text).unwrap();
        let pi = game.pi(0, &History::default()).unwrap();
        assert_eq!(pi, vec![0.25, 0.75]);
    }
}
