//! POVM families, validation, and measurement.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::matrix::CMatrix;
use super::state::StateVector;

/// A measurement family `{M_i}` with `sum M_i^dag M_i = I`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    /// Wraps measurement operators; they must be square and share one
    /// dimension. Completeness is checked separately by [`validate_povm`].
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::DimensionMismatch("POVM with no outcomes".into()));
        }
        let dim = elements[0].rows();
        for m in &elements {
            if !m.is_square() || m.rows() != dim {
                return Err(Error::DimensionMismatch(
                    "POVM elements must be square matrices of one dimension".into(),
                ));
            }
        }
        Ok(Povm { elements })
    }

    /// Two-outcome projective measurement `{P, I - P}`.
    pub fn binary_projective(p: CMatrix) -> Result<Self> {
        let complement = CMatrix::identity(p.rows()).sub(&p);
        Povm::new(vec![p, complement])
    }

    pub fn outcomes(&self) -> usize {
        self.elements.len()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn element(&self, i: usize) -> &CMatrix {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    /// `sum M_i^dag M_i` of the family.
    pub fn completeness_sum(&self) -> CMatrix {
        let dim = self.dim();
        let mut acc = CMatrix::zeros(dim, dim);
        for m in &self.elements {
            acc = acc.add(&m.dagger().mul(m));
        }
        acc
    }
}

/// Outcome of a completeness check: the max-entry residual of
/// `sum M_i^dag M_i - I` and whether it clears the tolerance.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PovmValidation {
    pub residual: f64,
    pub pass: bool,
}

pub fn validate_povm(p: &Povm, tol: &Tolerances) -> PovmValidation {
    let residual = p
        .completeness_sum()
        .max_abs_diff(&CMatrix::identity(p.dim()));
    PovmValidation {
        residual,
        pass: residual <= tol.povm_residual,
    }
}

/// Measurement result: outcome probabilities and renormalized
/// post-measurement states. Outcomes whose probability falls below the
/// pruning tolerance carry no post-state.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub probabilities: Vec<f64>,
    pub post_states: Vec<Option<StateVector>>,
}

pub fn measure(p: &Povm, state: &StateVector, tol: &Tolerances) -> Result<Measurement> {
    let check = validate_povm(p, tol);
    if !check.pass {
        return Err(Error::InvalidPovm(check.residual));
    }
    if p.dim() != state.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dimension {} vs state dimension {}",
            p.dim(),
            state.dim()
        )));
    }
    let mut probabilities = Vec::with_capacity(p.outcomes());
    let mut post_states = Vec::with_capacity(p.outcomes());
    for m in &p.elements {
        let image = m.apply(state.amplitudes())?;
        let prob: f64 = image.iter().map(|z| z.norm_sqr()).sum();
        probabilities.push(prob);
        if prob < tol.prune {
            post_states.push(None);
        } else {
            let norm = prob.sqrt();
            let amps: Vec<Complex64> = image.into_iter().map(|z| z / norm).collect();
            post_states.push(Some(StateVector::normalized(amps)?));
        }
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > tol.prob_sum {
        return Err(Error::NotNormalized((total - 1.0).abs()));
    }
    Ok(Measurement {
        probabilities,
        post_states,
    })
}
