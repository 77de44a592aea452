//! Singular value and Hermitian eigenvalue decompositions.
//!
//! Jacobi iterations: one-sided rotations for the SVD, two-sided for the
//! Hermitian eigenproblem. The matrices here are small (Schmidt splits,
//! payoff operators, gate differences), so robustness beats asymptotics.

use num_complex::Complex64;

use super::matrix::CMatrix;

const MAX_SWEEPS: usize = 64;
const OFFDIAG_TOL: f64 = 1e-14;

/// `a = u * diag(sigma) * v^dag`, singular values sorted nonincreasing.
///
/// `u` is `m x r` and `v` is `n x r` with `r = min(m, n)`. Columns paired
/// with a zero singular value are zero vectors.
pub struct Svd {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Computes the rotation diagonalizing the Hermitian 2x2 block
/// [[app, apq], [conj(apq), aqq]]; returns (c, s, phase) with
/// new_p = c*p - s*conj(phase)*q and new_q = s*phase*p + c*q.
fn jacobi_rotation(app: f64, aqq: f64, apq: Complex64) -> (f64, f64, Complex64) {
    let mag = apq.norm();
    let phase = apq / mag;
    let tau = (aqq - app) / (2.0 * mag);
    let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, c * t, phase)
}

pub fn svd(a: &CMatrix) -> Svd {
    if a.rows() < a.cols() {
        // svd(a^dag) = v sigma u^dag
        let flipped = svd(&a.dagger());
        return Svd {
            u: flipped.v,
            sigma: flipped.sigma,
            v: flipped.u,
        };
    }
    let m = a.rows();
    let n = a.cols();
    // work on columns: w[:, j] lives in col-major scratch
    let mut w: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..m).map(|i| a.get(i, j)).collect())
        .collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..m {
                    app += w[p][i].norm_sqr();
                    aqq += w[q][i].norm_sqr();
                    apq += w[p][i].conj() * w[q][i];
                }
                if apq.norm() <= OFFDIAG_TOL * (app * aqq).sqrt() + f64::MIN_POSITIVE {
                    continue;
                }
                converged = false;
                let (c, s, phase) = jacobi_rotation(app, aqq, apq);
                let sp = s * phase;
                let spc = s * phase.conj();
                for i in 0..m {
                    let wp = w[p][i];
                    let wq = w[q][i];
                    w[p][i] = c * wp - spc * wq;
                    w[q][i] = sp * wp + c * wq;
                }
                for i in 0..n {
                    let vp = v[p][i];
                    let vq = v[q][i];
                    v[p][i] = c * vp - spc * vq;
                    v[q][i] = sp * vp + c * vq;
                }
            }
        }
        if converged {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = w.iter().map(|col| col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let mut u = CMatrix::zeros(m, n);
    let mut vv = CMatrix::zeros(n, n);
    let mut sigma = Vec::with_capacity(n);
    for (rank, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > f64::MIN_POSITIVE {
            for i in 0..m {
                u.set(i, rank, w[j][i] / s);
            }
        }
        for i in 0..n {
            vv.set(i, rank, v[j][i]);
        }
    }
    Svd { u, sigma, v: vv }
}

/// Eigen-decomposition of a Hermitian matrix: `a = vecs * diag(vals) * vecs^dag`,
/// eigenvalues sorted nonincreasing, eigenvectors as columns.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert!(a.is_square(), "hermitian_eigen needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);

    for _ in 0..MAX_SWEEPS {
        let scale: f64 = (0..n).map(|i| m.get(i, i).re.abs()).fold(1e-300, f64::max);
        let mut converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.norm() <= OFFDIAG_TOL * scale {
                    continue;
                }
                converged = false;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let (c, s, phase) = jacobi_rotation(app, aqq, apq);
                let sp = s * phase;
                let spc = s * phase.conj();
                // columns: m <- m R
                for i in 0..n {
                    let mp = m.get(i, p);
                    let mq = m.get(i, q);
                    m.set(i, p, c * mp - spc * mq);
                    m.set(i, q, sp * mp + c * mq);
                }
                // rows: m <- R^dag m
                for i in 0..n {
                    let mp = m.get(p, i);
                    let mq = m.get(q, i);
                    m.set(p, i, c * mp - sp * mq);
                    m.set(q, i, spc * mp + c * mq);
                }
                for i in 0..n {
                    let vp = v.get(i, p);
                    let vq = v.get(i, q);
                    v.set(i, p, c * vp - spc * vq);
                    v.set(i, q, sp * vp + c * vq);
                }
            }
        }
        if converged {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (rank, &j) in order.iter().enumerate() {
        for i in 0..n {
            vecs.set(i, rank, v.get(i, j));
        }
    }
    (vals, vecs)
}

/// Largest singular value.
pub fn operator_norm(a: &CMatrix) -> f64 {
    let gram = a.dagger().mul(a);
    let (vals, _) = hermitian_eigen(&gram);
    vals.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Projector onto the span of eigenvectors with eigenvalue >= -threshold
/// (the kernel counts as part of the nonnegative eigenspace).
pub fn nonnegative_eigenspace_projector(h: &CMatrix, threshold: f64) -> CMatrix {
    let n = h.rows();
    let (vals, vecs) = hermitian_eigen(h);
    let mut p = CMatrix::zeros(n, n);
    for (idx, &lambda) in vals.iter().enumerate() {
        if lambda < -threshold {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let v = p.get(i, j) + vecs.get(i, idx) * vecs.get(j, idx).conj();
                p.set(i, j, v);
            }
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMatrix {
        CMatrix::from_fn(m, n, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    }

    fn reconstruct(svd: &Svd) -> CMatrix {
        let r = svd.sigma.len();
        let m = svd.u.rows();
        let n = svd.v.rows();
        let mut out = CMatrix::zeros(m, n);
        for k in 0..r {
            for i in 0..m {
                for j in 0..n {
                    let v = out.get(i, j) + svd.u.get(i, k) * svd.sigma[k] * svd.v.get(j, k).conj();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    #[test]
    fn svd_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(m, n) in &[(4usize, 4usize), (8, 3), (3, 8), (16, 16)] {
            let a = random_matrix(&mut rng, m, n);
            let dec = svd(&a);
            assert!(reconstruct(&dec).max_abs_diff(&a) < 1e-11);
            for w in dec.sigma.windows(2) {
                assert!(w[0] >= w[1] - 1e-14);
            }
            // left singular vectors orthonormal on the nonzero spectrum
            let gram = dec.u.dagger().mul(&dec.u);
            for i in 0..dec.sigma.len() {
                if dec.sigma[i] > 1e-12 {
                    assert!((gram.get(i, i).re - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn svd_of_diagonal_matrix() {
        let a = CMatrix::from_real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let dec = svd(&a);
        assert!((dec.sigma[0] - 3.0).abs() < 1e-13);
        assert!((dec.sigma[1] - 2.0).abs() < 1e-13);
        assert!((dec.sigma[2] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn hermitian_eigen_recovers_spectrum() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 4, 8, 16] {
            let g = random_matrix(&mut rng, n, n);
            let h = g.add(&g.dagger());
            let (vals, vecs) = hermitian_eigen(&h);
            assert!(vecs.is_unitary(1e-11));
            for k in 0..n {
                // residual ||H v - lambda v||
                let col: Vec<Complex64> = (0..n).map(|i| vecs.get(i, k)).collect();
                let hv = h.apply(&col).unwrap();
                let mut res = 0.0f64;
                for i in 0..n {
                    res = res.max((hv[i] - vals[k] * col[i]).norm());
                }
                assert!(res < 1e-10, "residual {res} at n={n} k={k}");
            }
            for w in vals.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn operator_norm_of_pauli_x_is_one() {
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert!((operator_norm(&x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn nonnegative_projector_splits_spectrum() {
        let h = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -2.0]);
        let p = nonnegative_eigenspace_projector(&h, 1e-12);
        let expect = CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(p.max_abs_diff(&expect) < 1e-12);
    }
}
