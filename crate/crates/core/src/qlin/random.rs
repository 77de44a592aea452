//! Seeded random states, unitaries, and POVMs for sweeps and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::complete::complete_columns;
use super::matrix::CMatrix;
use super::povm::Povm;
use super::state::StateVector;
use super::svd::hermitian_eigen;

/// Haar-ish random pure state: complex Gaussian amplitudes, normalized.
pub fn random_state<R: Rng>(qubits: u32, rng: &mut R) -> StateVector {
    let dim = 1usize << qubits;
    let amps: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(amps).expect("gaussian amplitudes normalize")
}

/// Random unitary from Gram-Schmidt over a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    loop {
        let mut defined = Vec::with_capacity(dim);
        let mut accepted: Vec<Vec<Complex64>> = Vec::new();
        let mut ok = true;
        for col in 0..dim {
            let mut v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            for base in &accepted {
                let coeff: Complex64 = base.iter().zip(&v).map(|(b, x)| b.conj() * x).sum();
                for (x, b) in v.iter_mut().zip(base) {
                    *x -= coeff * b;
                }
            }
            let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for x in v.iter_mut() {
                *x /= norm;
            }
            accepted.push(v.clone());
            defined.push((col, v));
        }
        if ok {
            if let Ok(u) = complete_columns(dim, &defined) {
                return u;
            }
        }
    }
}

/// Random full-rank POVM with `outcomes` elements: Gaussian blocks
/// whitened by the inverse square root of their completeness sum.
pub fn random_povm<R: Rng>(dim: usize, outcomes: usize, rng: &mut R) -> Povm {
    let blocks: Vec<CMatrix> = (0..outcomes)
        .map(|_| {
            CMatrix::from_fn(dim, dim, |_, _| {
                Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
            })
        })
        .collect();
    let mut sum = CMatrix::zeros(dim, dim);
    for b in &blocks {
        sum = sum.add(&b.dagger().mul(b));
    }
    let (vals, vecs) = hermitian_eigen(&sum);
    // sum^{-1/2}
    let mut inv_sqrt = CMatrix::zeros(dim, dim);
    for k in 0..dim {
        let w = 1.0 / vals[k].max(1e-300).sqrt();
        for i in 0..dim {
            for j in 0..dim {
                let v = inv_sqrt.get(i, j) + vecs.get(i, k) * w * vecs.get(j, k).conj();
                inv_sqrt.set(i, j, v);
            }
        }
    }
    let elements = blocks.into_iter().map(|b| b.mul(&inv_sqrt)).collect();
    Povm::new(elements).expect("whitened blocks form a POVM")
}

/// Random rank-`dim/2`-ish projector: the nonnegative eigenspace of a random
/// Hermitian matrix.
pub fn random_projector<R: Rng>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let h = g.add(&g.dagger());
    super::svd::nonnegative_eigenspace_projector(&h, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::qlin::povm::validate_povm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_state_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(3, &mut rng);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = random_unitary(8, &mut rng);
        assert!(u.is_unitary(1e-10));
    }

    #[test]
    fn random_povm_is_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = random_povm(4, 3, &mut rng);
        assert!(validate_povm(&p, &Tolerances::DEFAULT).pass);
    }

    #[test]
    fn random_projector_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = random_projector(4, &mut rng);
        assert!(p.mul(&p).max_abs_diff(&p) < 1e-10);
        assert!(p.max_abs_diff(&p.dagger()) < 1e-10);
    }
}
