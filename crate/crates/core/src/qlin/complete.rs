//! Completion of partial isometries to full unitaries.

use num_complex::Complex64;

use crate::error::{Error, Result};

use super::matrix::CMatrix;

/// Residual norm below which a candidate basis vector is considered to lie
/// in the span of the columns placed so far.
const SPAN_TOL: f64 = 1e-7;

/// Builds a `dim x dim` unitary whose listed columns are the given
/// orthonormal vectors; the remaining columns are filled by Gram-Schmidt
/// over the computational basis, visited in index order, and assigned to the
/// free column indices in ascending order. The completion is deterministic.
pub fn complete_columns(dim: usize, defined: &[(usize, Vec<Complex64>)]) -> Result<CMatrix> {
    let mut used = vec![false; dim];
    let mut columns: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for (idx, col) in defined {
        if *idx >= dim || used[*idx] {
            return Err(Error::DimensionMismatch(format!(
                "column index {idx} out of range or repeated"
            )));
        }
        if col.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "column of length {} in dimension {}",
                col.len(),
                dim
            )));
        }
        used[*idx] = true;
        columns.push(col.clone());
    }
    // verify the defined columns are orthonormal
    for (i, a) in columns.iter().enumerate() {
        for (j, b) in columns.iter().enumerate() {
            let g: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - expect).norm() > 1e-8 {
                return Err(Error::DimensionMismatch(
                    "defined columns are not orthonormal".into(),
                ));
            }
        }
    }

    let mut free_indices: Vec<usize> = (0..dim).filter(|&i| !used[i]).collect();
    free_indices.reverse(); // pop from the back yields ascending order

    let mut out = CMatrix::zeros(dim, dim);
    for (idx, col) in defined {
        for (row, v) in col.iter().enumerate() {
            out.set(row, *idx, *v);
        }
    }

    let mut accepted: Vec<Vec<Complex64>> = columns;
    for cand in 0..dim {
        if free_indices.is_empty() {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[cand] = Complex64::new(1.0, 0.0);
        // two passes of projection for numerical hygiene
        for _ in 0..2 {
            for base in &accepted {
                let coeff: Complex64 = base.iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
                for (x, b) in v.iter_mut().zip(base) {
                    *x -= coeff * b;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < SPAN_TOL {
            continue;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
        let target = free_indices.pop().expect("free index available");
        for (row, val) in v.iter().enumerate() {
            out.set(row, target, *val);
        }
        accepted.push(v);
    }
    if !free_indices.is_empty() {
        return Err(Error::DimensionMismatch(
            "could not complete the isometry to a unitary".into(),
        ));
    }
    Ok(out)
}
