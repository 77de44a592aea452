//! Standard gate matrices and a few fixed states.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use super::matrix::CMatrix;
use super::state::StateVector;

pub fn identity(qubits: u32) -> CMatrix {
    CMatrix::identity(1 << qubits)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(0, 1, Complex64::new(0.0, -1.0));
    m.set(1, 0, Complex64::new(0.0, 1.0));
    m
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn hadamard() -> CMatrix {
    CMatrix::from_real(
        2,
        2,
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    )
}

/// Phase gate diag(1, i).
pub fn phase_s() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::new(1.0, 0.0));
    m.set(1, 1, Complex64::new(0.0, 1.0));
    m
}

/// The pi/8 gate diag(1, e^{i pi/4}).
pub fn gate_t() -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::new(1.0, 0.0));
    m.set(1, 1, Complex64::from_polar(1.0, FRAC_PI_4));
    m
}

/// Real rotation [[cos t/2, -sin t/2], [sin t/2, cos t/2]].
pub fn ry(theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    CMatrix::from_real(2, 2, &[c, -s, s, c])
}

pub fn rz(theta: f64) -> CMatrix {
    let mut m = CMatrix::zeros(2, 2);
    m.set(0, 0, Complex64::from_polar(1.0, -theta / 2.0));
    m.set(1, 1, Complex64::from_polar(1.0, theta / 2.0));
    m
}

/// CNOT with the more significant qubit as control.
pub fn cnot() -> CMatrix {
    CMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn swap() -> CMatrix {
    CMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

pub fn cz() -> CMatrix {
    CMatrix::from_real(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0,
        ],
    )
}

/// Projector |v><v| from a (not necessarily normalized) vector.
pub fn projector(v: &[Complex64]) -> CMatrix {
    let n = v.len();
    let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() / norm_sqr)
}

/// The maximally entangled pair (|00> + |11>)/sqrt(2).
pub fn epr() -> StateVector {
    StateVector::normalized(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
    .expect("epr amplitudes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_to_the_eighth_is_identity() {
        let t = gate_t();
        let mut acc = CMatrix::identity(2);
        for _ in 0..8 {
            acc = t.mul(&acc);
        }
        assert!(acc.max_abs_diff(&CMatrix::identity(2)) < 1e-14);
    }

    #[test]
    fn hzh_is_x() {
        let h = hadamard();
        let hzh = h.mul(&pauli_z()).mul(&h);
        assert!(hzh.max_abs_diff(&pauli_x()) < 1e-14);
    }

    #[test]
    fn ry_conjugates_z_to_hadamard() {
        // H = Ry(pi/4) Z Ry(-pi/4)
        let lhs = ry(FRAC_PI_4).mul(&pauli_z()).mul(&ry(-FRAC_PI_4));
        assert!(lhs.max_abs_diff(&hadamard()) < 1e-14);
    }
}
