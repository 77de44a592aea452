//! Program search: iterative deepening over the slot count with a
//! meet-in-the-middle split.
//!
//! Depth-first enumeration composes prefix products slot by slot; the final
//! few slots come from precomputed suffix-product tables, matched against
//! `target * prefix^dag` through a trace bound. For unitaries `U, V` of
//! dimension `n`, the phase-minimized Frobenius distance is
//! `sqrt(2n - 2|tr(U^dag V)|)`; it upper-bounds the operator-norm distance
//! and `1/sqrt(n)` of it lower-bounds it, which gives both the rejection
//! filter and the cheap acceptance certificate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::games::MenuOp;
use crate::qlin::CMatrix;

use super::{distance, evaluate, DispatchCircuit, ProgramRegister, GATE_MENU};

/// Suffix length covered by the precomputed tables.
const SUFFIX_DEPTH: usize = 4;

/// Outcome of a program search. `distance` is the exact phase-invariant
/// operator-norm distance of the returned program, or the best certified
/// distance among examined candidates when the search failed.
#[derive(Clone, Debug)]
pub struct SynthResult {
    pub program: Option<ProgramRegister>,
    pub distance: f64,
    pub examined: u64,
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Slot-pair pattern period along the slot axis.
fn pair_period(width: u32) -> usize {
    let d = width as usize;
    d / gcd(2, d)
}

fn slot_gate(width: u32, slot: usize, op: MenuOp) -> CMatrix {
    let probe = DispatchCircuit::new(slot + 1, width).expect("width checked");
    let (p, q) = probe.slot_targets(slot);
    op.matrix().embed(width, &[p, q])
}

/// `tr(P^dag Q)`.
fn overlap_trace(p: &CMatrix, q: &CMatrix) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in p.data().iter().zip(q.data()) {
        acc += a.conj() * b;
    }
    acc
}

struct SuffixEntry {
    ops: Vec<MenuOp>,
    product: CMatrix,
    /// `product^dag * target`, so the trace against a prefix is one pass.
    aligned: CMatrix,
}

/// All `4^r` suffix products for slots starting at a position congruent to
/// `offset` modulo the pair period.
fn build_suffix_tables(
    target: &CMatrix,
    width: u32,
    max_len: usize,
) -> Vec<Vec<Vec<SuffixEntry>>> {
    let period = pair_period(width);
    let dim = target.rows();
    let mut tables = Vec::with_capacity(period);
    for offset in 0..period {
        let mut by_len: Vec<Vec<SuffixEntry>> = Vec::with_capacity(max_len + 1);
        by_len.push(vec![SuffixEntry {
            ops: Vec::new(),
            product: CMatrix::identity(dim),
            aligned: target.clone(),
        }]);
        for r in 1..=max_len {
            let mut entries = Vec::with_capacity(by_len[r - 1].len() * 4);
            for shorter in &by_len[r - 1] {
                for &op in &GATE_MENU {
                    // appending at absolute position offset + r - 1
                    let gate = slot_gate(width, offset + r - 1, op);
                    let product = gate.mul(&shorter.product);
                    let aligned = product.dagger().mul(target);
                    let mut ops = shorter.ops.clone();
                    ops.push(op);
                    entries.push(SuffixEntry { ops, product, aligned });
                }
            }
            by_len.push(entries);
        }
        tables.push(by_len);
    }
    tables
}

struct Search<'a> {
    target: &'a CMatrix,
    width: u32,
    eps: f64,
    tables: Vec<Vec<Vec<SuffixEntry>>>,
    period: usize,
    dim: f64,
    examined: u64,
    best_certified: f64,
    best_ops: Vec<MenuOp>,
}

impl Search<'_> {
    /// Scans the suffix table against a fixed prefix product; returns the
    /// full op list on success.
    fn scan(&mut self, prefix_ops: &[MenuOp], prefix: &CMatrix, suffix_len: usize) -> Option<Vec<MenuOp>> {
        let offset = prefix_ops.len() % self.period;
        let n = self.dim;
        // iterate over an index range to keep the borrow checker away from
        // simultaneous &mut self use
        for idx in 0..self.tables[offset][suffix_len].len() {
            self.examined += 1;
            let entry = &self.tables[offset][suffix_len][idx];
            let overlap = overlap_trace(prefix, &entry.aligned).norm();
            let frob_sq = (2.0 * n - 2.0 * overlap).max(0.0);
            let upper = frob_sq.sqrt();
            let lower = (frob_sq / n).sqrt();
            if upper < self.best_certified {
                self.best_certified = upper;
                self.best_ops = prefix_ops.iter().chain(&entry.ops).copied().collect();
            }
            if lower > self.eps {
                continue;
            }
            let mut ops: Vec<MenuOp> = prefix_ops.to_vec();
            ops.extend(&entry.ops);
            if upper <= self.eps {
                return Some(ops);
            }
            // the band where only the exact distance can decide
            let candidate = entry.product.mul(prefix);
            let exact = distance(&candidate, self.target).expect("same dimensions");
            if exact < self.best_certified {
                self.best_certified = exact;
                self.best_ops = ops.clone();
            }
            if exact <= self.eps {
                return Some(ops);
            }
        }
        None
    }

    fn dfs(
        &mut self,
        prefix_ops: &mut Vec<MenuOp>,
        prefix: &CMatrix,
        prefix_target_len: usize,
        suffix_len: usize,
    ) -> Option<Vec<MenuOp>> {
        if prefix_ops.len() == prefix_target_len {
            return self.scan(prefix_ops, prefix, suffix_len);
        }
        let position = prefix_ops.len();
        for &op in &GATE_MENU {
            let gate = slot_gate(self.width, position, op);
            let grown = gate.mul(prefix);
            prefix_ops.push(op);
            if let Some(found) = self.dfs(prefix_ops, &grown, prefix_target_len, suffix_len) {
                return Some(found);
            }
            prefix_ops.pop();
        }
        None
    }
}

/// Searches for a shortest program whose evaluation approximates `target`
/// within `eps` in phase-invariant operator norm, deepening the slot count
/// up to `max_slots`.
pub fn synthesize(
    target: &CMatrix,
    width: u32,
    eps: f64,
    max_slots: usize,
) -> Result<SynthResult> {
    if !(2..=3).contains(&width) {
        return Err(Error::UnsupportedGame(format!(
            "synthesis works on 2 or 3 working qubits, got {width}"
        )));
    }
    let dim = 1usize << width;
    if target.rows() != dim || target.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "target is {}x{}, dispatch width {width} needs {dim}x{dim}",
            target.rows(),
            target.cols()
        )));
    }
    if eps <= 0.0 {
        return Err(Error::EpsilonOutOfRange(eps));
    }

    let tables = build_suffix_tables(target, width, SUFFIX_DEPTH);
    let mut search = Search {
        target,
        width,
        eps,
        period: pair_period(width),
        tables,
        dim: dim as f64,
        examined: 0,
        best_certified: f64::INFINITY,
        best_ops: Vec::new(),
    };

    for slots in 0..=max_slots {
        let suffix_len = slots.min(SUFFIX_DEPTH);
        let prefix_len = slots - suffix_len;
        let mut prefix_ops = Vec::with_capacity(prefix_len);
        let identity = CMatrix::identity(dim);
        if let Some(ops) = search.dfs(&mut prefix_ops, &identity, prefix_len, suffix_len) {
            let program = ProgramRegister::from_ops(&ops);
            let dispatch = DispatchCircuit::new(program.slot_count(), width)?;
            let exact = distance(&evaluate(&dispatch, &program)?, target)?;
            return Ok(SynthResult {
                program: Some(program),
                distance: exact,
                examined: search.examined,
            });
        }
    }
    let best = search.best_certified;
    let _ = search.best_ops;
    Ok(SynthResult {
        program: None,
        distance: best,
        examined: search.examined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::gates;

    #[test]
    fn in_menu_gate_synthesizes_at_depth_one() {
        let target = CMatrix::identity(2).kron(&gates::hadamard());
        let result = synthesize(&target, 2, 1e-9, 3).unwrap();
        let program = result.program.expect("found");
        assert_eq!(program.to_string(), "10");
        assert!(result.distance < 1e-9);
    }

    #[test]
    fn two_slot_composition_is_found() {
        // CNOT * (I (x) H): program 10 then 01
        let target = gates::cnot().mul(&CMatrix::identity(2).kron(&gates::hadamard()));
        let result = synthesize(&target, 2, 1e-9, 4).unwrap();
        let program = result.program.expect("found");
        assert_eq!(program.to_string(), "1001");
        assert!(result.distance < 1e-9);
    }

    #[test]
    fn identity_is_the_empty_program() {
        let result = synthesize(&CMatrix::identity(4), 2, 1e-9, 4).unwrap();
        let program = result.program.expect("found");
        assert_eq!(program.slot_count(), 0);
        assert!(result.distance < 1e-12);
    }

    #[test]
    fn small_rotation_synthesizes_within_budget() {
        let target = CMatrix::identity(2).kron(&gates::rz(0.3));
        let result = synthesize(&target, 2, 0.2, 12).unwrap();
        let program = result.program.expect("found within twelve slots");
        assert!(result.distance <= 0.2, "distance {}", result.distance);
        // verify against a fresh evaluation
        let dispatch = DispatchCircuit::new(program.slot_count(), 2).unwrap();
        let realized = evaluate(&dispatch, &program).unwrap();
        assert!(distance(&realized, &target).unwrap() <= 0.2);
    }

    #[test]
    fn unreachable_budget_reports_best_distance() {
        let target = CMatrix::identity(2).kron(&gates::ry(0.7));
        let result = synthesize(&target, 2, 1e-6, 2).unwrap();
        assert!(result.program.is_none());
        assert!(result.distance.is_finite());
        assert!(result.distance > 1e-6);
    }

    #[test]
    fn wraparound_slots_are_searchable_at_width_three() {
        // H on the work qubit 2 sits at slot 2 (pair (1, 2)); padding the
        // earlier slots out is impossible without cancellations, so ask for
        // the full pattern SWAP(0,1) SWAP(2,0) then I(x)H on (1,2).
        let h2 = gates::hadamard().embed(3, &[2]);
        let sw01 = gates::swap().embed(3, &[0, 1]);
        let sw20 = gates::swap().embed(3, &[2, 0]);
        let target = h2.mul(&sw20).mul(&sw01);
        let result = synthesize(&target, 3, 1e-9, 3).unwrap();
        let program = result.program.expect("found");
        assert_eq!(program.to_string(), "000010");
        assert!(result.distance < 1e-9);
    }
}
