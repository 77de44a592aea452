//! Closed-form embezzlement fidelity and the catalyst-size guarantee.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::qlin::SchmidtDecomposition;

use super::selection::{fidelity_of_selection, select_top_products};
use super::catalyst_side;

/// `< mu (x) psi | E(psi) > = (1/C^2) sum_r alpha_{i_r} / sqrt(j_r * r)`,
/// computed from the structured selection without building a dense state.
/// Real and in (0, 1]; equals 1 exactly when `psi` is a product state.
pub fn embezzlement_fidelity(source: &SchmidtDecomposition, n: u32) -> f64 {
    let selection = select_top_products(source.coefficients(), n);
    fidelity_of_selection(&selection, source.coefficients())
}

/// Outcome of checking the fidelity guarantee at `n = ceil(m / epsilon)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct FidelityBoundReport {
    pub m: u32,
    pub epsilon: f64,
    pub n: u32,
    pub fidelity: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Picks `n = ceil(m / epsilon)` and checks that the closed-form fidelity
/// reaches `1 - epsilon`.
pub fn verify_fidelity_bound(source: &SchmidtDecomposition, epsilon: f64) -> Result<FidelityBoundReport> {
    let m = source.left_qubits();
    let n = catalyst_side(m, epsilon)?;
    let fidelity = embezzlement_fidelity(source, n);
    let bound = 1.0 - epsilon;
    Ok(FidelityBoundReport {
        m,
        epsilon,
        n,
        fidelity,
        bound,
        pass: fidelity >= bound,
    })
}
