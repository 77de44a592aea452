//! The van Dam-Hayden embezzlement family.
//!
//! The catalyst on 2n qubits is `|mu> = (1/C) sum_j j^{-1/2} |j>|j>` with
//! `C^2` the 2^n-th harmonic number. Tensoring `mu` with a bipartite state
//! `psi` and keeping the 2^n largest product Schmidt coefficients yields the
//! embezzled version `E(psi)`, which local unitaries reach exactly from
//! `mu (x) |1>|1>` and which overlaps `mu (x) psi` with fidelity approaching
//! one as n grows.
//!
//! Index convention: the labels `j`, `i`, and `r` are 1-based; computational
//! bit encodings subtract one, so the 1-based `|1>_m` is the all-zeros basis
//! state.

mod fidelity;
mod selection;
mod unitaries;

pub use fidelity::{embezzlement_fidelity, verify_fidelity_bound, FidelityBoundReport};
pub use selection::{
    embezzled_version, product_to_bipartite_permutation, select_top_products, EmbezzledSelection,
    EmbezzledVersion,
};
pub use unitaries::embezzle_unitaries;

use crate::error::{Error, Result};
use crate::qlin::StateVector;
use num_complex::Complex64;

/// The embezzlement state on `2n` qubits, held in structured form: only the
/// side size and the normalization `C = sqrt(sum_{j=1}^{2^n} 1/j)`.
#[derive(Clone, Copy, Debug)]
pub struct EmbezzlementState {
    n: u32,
    normalization: f64,
}

impl EmbezzlementState {
    pub fn new(n: u32) -> Result<Self> {
        Ok(EmbezzlementState {
            n,
            normalization: harmonic_norm(n)?,
        })
    }

    /// Qubits per side.
    pub fn side_qubits(&self) -> u32 {
        self.n
    }

    /// The constant `C`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Amplitude carried by `|j>|j>` (1-based `j`).
    pub fn amplitude(&self, j: u64) -> f64 {
        1.0 / (self.normalization * (j as f64).sqrt())
    }

    pub fn dense(&self, dense_cap: u32) -> Result<StateVector> {
        mu_state(self.n, dense_cap)
    }
}

/// `C = sqrt(H_{2^n})`, the 2^n-th harmonic number under a square root,
/// accumulated with compensated summation.
pub fn harmonic_norm(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::DimensionMismatch("catalyst needs n >= 1".into()));
    }
    if n >= 64 {
        return Err(Error::QubitOverflow(n));
    }
    let count = 1u64 << n;
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for j in 1..=count {
        let term = 1.0 / j as f64 - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    Ok(sum.sqrt())
}

/// Dense rendering of the embezzlement state on `2n` qubits: amplitude
/// `1/(C sqrt(j))` at the index encoding `|j>|j>`, zero elsewhere.
pub fn mu_state(n: u32, dense_cap: u32) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::DimensionMismatch("catalyst needs n >= 1".into()));
    }
    if n > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n, cap: dense_cap });
    }
    let c = harmonic_norm(n)?;
    let side = 1usize << n;
    let mut amps = vec![Complex64::new(0.0, 0.0); side * side];
    for j in 1..=side {
        amps[(j - 1) * side + (j - 1)] = Complex64::new(1.0 / (c * (j as f64).sqrt()), 0.0);
    }
    StateVector::normalized(amps)
}

/// Smallest catalyst side size honoring `n >= m / epsilon`.
pub fn catalyst_side(m: u32, epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon));
    }
    // the small slack absorbs quotient round-off when m/epsilon is integral
    let n = (m as f64 / epsilon - 1e-9).ceil();
    Ok((n as u32).max(1))
}
