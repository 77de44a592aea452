//! Overlaps, trace distance for pure states, total-variation distance.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::state::StateVector;

/// Inner product `<a|b>` (conjugate-linear in `a`).
pub fn overlap(a: &StateVector, b: &StateVector) -> Result<Complex64> {
    if a.qubit_count() != b.qubit_count() {
        return Err(Error::DimensionMismatch(format!(
            "overlap of {} vs {} qubits",
            a.qubit_count(),
            b.qubit_count()
        )));
    }
    Ok(a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// Trace distance between two pure states, `sqrt(1 - |<a|b>|^2)`.
pub fn trace_distance_pure(a: &StateVector, b: &StateVector) -> Result<f64> {
    let ov = overlap(a, b)?;
    Ok((1.0 - ov.norm_sqr()).max(0.0).sqrt())
}

/// Total-variation distance `1/2 sum |p_i - q_i|` between two outcome
/// distributions over the same support.
pub fn tv_distance(p: &[f64], q: &[f64], tol: &Tolerances) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(format!(
            "distributions with support sizes {} and {}",
            p.len(),
            q.len()
        )));
    }
    for dist in [p, q] {
        let total: f64 = dist.iter().sum();
        if (total - 1.0).abs() > tol.prob_sum {
            return Err(Error::NotNormalized((total - 1.0).abs()));
        }
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
