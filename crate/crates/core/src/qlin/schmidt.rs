//! Schmidt decomposition of bipartite pure states.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::state::{tensor, StateVector};
use super::svd::svd;

/// `state = sum_i alpha_i |left_i> (x) |right_i>` with nonincreasing
/// coefficients and orthonormal basis sets on each side. Coefficients at or
/// below the Schmidt cutoff are dropped.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    left_basis: Vec<StateVector>,
    right_basis: Vec<StateVector>,
    left_qubits: u32,
    right_qubits: u32,
}

impl SchmidtDecomposition {
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    pub fn left_basis(&self) -> &[StateVector] {
        &self.left_basis
    }

    pub fn right_basis(&self) -> &[StateVector] {
        &self.right_basis
    }

    pub fn left_qubits(&self) -> u32 {
        self.left_qubits
    }

    pub fn right_qubits(&self) -> u32 {
        self.right_qubits
    }

    /// Builds a decomposition directly from coefficients and basis vectors.
    /// Intended for synthetic sources (given spectra over computational
    /// bases); invariants are the caller's responsibility.
    pub fn from_parts(
        coefficients: Vec<f64>,
        left_basis: Vec<StateVector>,
        right_basis: Vec<StateVector>,
    ) -> Result<Self> {
        if coefficients.is_empty()
            || coefficients.len() != left_basis.len()
            || coefficients.len() != right_basis.len()
        {
            return Err(Error::DimensionMismatch(
                "coefficients and basis sets must have equal nonzero length".into(),
            ));
        }
        let left_qubits = left_basis[0].qubit_count();
        let right_qubits = right_basis[0].qubit_count();
        Ok(SchmidtDecomposition {
            coefficients,
            left_basis,
            right_basis,
            left_qubits,
            right_qubits,
        })
    }

    /// `sum_i alpha_i |left_i> (x) |right_i>` as a dense state.
    pub fn reconstruct(&self) -> StateVector {
        let dim = 1usize << (self.left_qubits + self.right_qubits);
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        for ((&alpha, l), r) in self
            .coefficients
            .iter()
            .zip(&self.left_basis)
            .zip(&self.right_basis)
        {
            let term = tensor(l, r);
            for (a, t) in amps.iter_mut().zip(term.amplitudes()) {
                *a += alpha * t;
            }
        }
        StateVector::normalized(amps).expect("schmidt reconstruction is normalized")
    }

    /// Largest residual entry of `G - I` over both Gram matrices; zero for
    /// exactly orthonormal bases.
    pub fn orthonormality_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for basis in [&self.left_basis, &self.right_basis] {
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let g: Complex64 = a
                        .amplitudes()
                        .iter()
                        .zip(b.amplitudes())
                        .map(|(x, y)| x.conj() * y)
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((g - expect).norm());
                }
            }
        }
        worst
    }
}

/// Schmidt decomposition across the split after `left_qubits`, by singular
/// value decomposition of the amplitude matrix. Rejects inputs whose norm
/// deviates from 1 by more than `tol.norm_input`.
pub fn schmidt_decompose(
    state: &StateVector,
    left_qubits: u32,
    tol: &Tolerances,
) -> Result<SchmidtDecomposition> {
    if left_qubits == 0 || left_qubits >= state.qubit_count() {
        return Err(Error::DimensionMismatch(format!(
            "split at {} of {} qubits",
            left_qubits,
            state.qubit_count()
        )));
    }
    let dev = (state.norm() - 1.0).abs();
    if dev > tol.norm_input {
        return Err(Error::NotNormalized(dev));
    }
    let right_qubits = state.qubit_count() - left_qubits;
    let dec = svd(&state.as_matrix(left_qubits));

    let mut coefficients = Vec::new();
    let mut left_basis = Vec::new();
    let mut right_basis = Vec::new();
    for (k, &sigma) in dec.sigma.iter().enumerate() {
        if sigma <= tol.schmidt_cutoff {
            break; // sorted nonincreasing
        }
        coefficients.push(sigma);
        let l: Vec<Complex64> = (0..dec.u.rows()).map(|i| dec.u.get(i, k)).collect();
        // state = sum sigma u (x) conj(v)
        let r: Vec<Complex64> = (0..dec.v.rows()).map(|i| dec.v.get(i, k).conj()).collect();
        left_basis.push(StateVector::normalized(l)?);
        right_basis.push(StateVector::normalized(r)?);
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_basis,
        right_basis,
        left_qubits,
        right_qubits,
    })
}
