//! Local unitaries carrying `E(psi)` to `mu (x) |1>|1>`.
//!
//! Each side's unitary maps `|j_r> (x) |theta_{i_r}>` to `|r> (x) |1>_m` for
//! the selected pairs and is completed over the computational basis. Because
//! the defined source vectors live in disjoint `|j>` blocks, the completion
//! runs block by block yet agrees exactly with global Gram-Schmidt in index
//! order.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlin::{CMatrix, SchmidtDecomposition, StateVector};

use super::embezzled_version;

/// Builds `(U_A, U_B)` on `n + m` qubits per side (catalyst register first).
/// Applying `U_A (x) U_B` to the dense bipartite rendering of `E(psi)` gives
/// `mu (x) |1>_m |1>_m`; the adjoints run the preparation direction.
pub fn embezzle_unitaries(
    source: &SchmidtDecomposition,
    n: u32,
    dense_cap: u32,
) -> Result<(CMatrix, CMatrix)> {
    let m = source.left_qubits();
    if source.right_qubits() != m {
        return Err(Error::DimensionMismatch(
            "embezzlement needs an evenly split bipartite state".into(),
        ));
    }
    if n + m > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
    }
    let version = embezzled_version(source, n)?;
    let pairs = version.selection().pairs();
    let u_a = side_unitary(pairs, source.left_basis(), n, m);
    let u_b = side_unitary(pairs, source.right_basis(), n, m);
    Ok((u_a, u_b))
}

fn side_unitary(pairs: &[(u64, usize)], basis: &[StateVector], n: u32, m: u32) -> CMatrix {
    let work = 1usize << m;
    let blocks = 1usize << n;
    let dim = blocks * work;
    let selected = pairs.len();

    // row img = conj(src): U = sum_k |img_k><src_k|
    let mut u = CMatrix::zeros(dim, dim);
    let mut chosen_per_block: Vec<Vec<usize>> = vec![Vec::new(); blocks];
    for (r0, &(j, i)) in pairs.iter().enumerate() {
        let block = (j - 1) as usize;
        let image_row = r0 * work; // |r> (x) |1>_m encodes as (r-1) * 2^m
        let theta = basis[i - 1].amplitudes();
        for (x, v) in theta.iter().enumerate() {
            u.set(image_row, block * work + x, v.conj());
        }
        chosen_per_block[block].push(i - 1);
    }

    // free image indices, ascending: everything except (r-1) * 2^m, r <= N
    let mut free_images = (0..dim)
        .filter(|idx| !(idx % work == 0 && idx / work < selected))
        .collect::<Vec<_>>()
        .into_iter();

    for (block, chosen) in chosen_per_block.iter().enumerate() {
        let mut accepted: Vec<Vec<Complex64>> = chosen
            .iter()
            .map(|&i| basis[i].amplitudes().to_vec())
            .collect();
        for local in 0..work {
            if accepted.len() == work {
                break;
            }
            let mut v = vec![Complex64::new(0.0, 0.0); work];
            v[local] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for base in &accepted {
                    let coeff: Complex64 =
                        base.iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
                    for (x, b) in v.iter_mut().zip(base) {
                        *x -= coeff * b;
                    }
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-7 {
                continue;
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
            let image_row = free_images.next().expect("completion count matches");
            for (x, val) in v.iter().enumerate() {
                u.set(image_row, block * work + x, val.conj());
            }
            accepted.push(v);
        }
        debug_assert_eq!(accepted.len(), work, "block completion fills the block");
    }
    u
}
