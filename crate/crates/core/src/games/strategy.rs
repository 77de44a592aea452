//! Shared-state POVM strategies.

use std::collections::HashMap;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::qlin::{validate_povm, Povm, StateVector};

use super::classical::OwnView;

/// A prover's measurement book: one POVM per own view, keyed by the prover's
/// own questions and answers only, so a strategy cannot accidentally depend
/// on the other prover's transcript.
#[derive(Clone, Debug, Default)]
pub struct PovmBook {
    povms: HashMap<OwnView, Povm>,
}

impl PovmBook {
    pub fn new() -> Self {
        PovmBook::default()
    }

    pub fn insert(&mut self, view: OwnView, povm: Povm) {
        self.povms.insert(view, povm);
    }

    pub fn get(&self, view: &OwnView) -> Result<&Povm> {
        self.povms.get(view).ok_or_else(|| {
            Error::InvalidStrategy(format!(
                "no POVM for view (questions {:?}, answers {:?})",
                view.questions, view.answers
            ))
        })
    }

    pub fn views(&self) -> impl Iterator<Item = (&OwnView, &Povm)> {
        self.povms.iter()
    }

    /// Applies a transformation to every POVM element, preserving keys.
    pub fn map_elements(&self, mut f: impl FnMut(&crate::qlin::CMatrix) -> crate::qlin::CMatrix) -> Result<PovmBook> {
        let mut out = PovmBook::new();
        for (view, povm) in &self.povms {
            let elements = povm.elements().iter().map(&mut f).collect();
            out.insert(view.clone(), Povm::new(elements)?);
        }
        Ok(out)
    }
}

/// A strategy `(psi, X, Y)`: a shared `2m`-qubit state (Alice holds the left
/// `m` qubits) and history-indexed POVM books for each prover.
#[derive(Clone, Debug)]
pub struct PovmStrategy {
    shared_state: StateVector,
    side_qubits: u32,
    pub alice: PovmBook,
    pub bob: PovmBook,
}

impl PovmStrategy {
    pub fn new(shared_state: StateVector, alice: PovmBook, bob: PovmBook) -> Result<Self> {
        let total = shared_state.qubit_count();
        if total == 0 || total % 2 != 0 {
            return Err(Error::InvalidStrategy(format!(
                "shared state must split evenly, has {total} qubits"
            )));
        }
        let side_qubits = total / 2;
        let dim = 1usize << side_qubits;
        let strategy = PovmStrategy { shared_state, side_qubits, alice, bob };
        for (view, povm) in strategy.alice.views().chain(strategy.bob.views()) {
            if povm.dim() != dim {
                return Err(Error::InvalidStrategy(format!(
                    "POVM at view {:?} acts on dimension {}, side is {}",
                    view.questions,
                    povm.dim(),
                    dim
                )));
            }
        }
        Ok(strategy)
    }

    pub fn shared_state(&self) -> &StateVector {
        &self.shared_state
    }

    /// Qubits per side, `m`.
    pub fn side_qubits(&self) -> u32 {
        self.side_qubits
    }

    /// Checks every POVM in both books for completeness.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        for (_, povm) in self.alice.views().chain(self.bob.views()) {
            let check = validate_povm(povm, tol);
            if !check.pass {
                return Err(Error::InvalidPovm(check.residual));
            }
        }
        Ok(())
    }

    /// Largest completeness residual over both books.
    pub fn worst_povm_residual(&self, tol: &Tolerances) -> f64 {
        self.alice
            .views()
            .chain(self.bob.views())
            .map(|(_, p)| validate_povm(p, tol).residual)
            .fold(0.0, f64::max)
    }
}
