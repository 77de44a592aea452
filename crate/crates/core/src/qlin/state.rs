//! Pure-state vectors on qubit registers.
//!
//! Register-order convention used everywhere in this crate: qubit 0 is the
//! most significant bit of the amplitude index, so `tensor(a, b)` puts `a`'s
//! qubits in front and `amplitudes[i * 2^qb + j] = a[i] * b[j]`.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};

use super::matrix::CMatrix;

#[derive(Clone, PartialEq)]
pub struct StateVector {
    qubits: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wraps an amplitude vector, requiring a power-of-two length and unit
    /// norm within `tol.norm`.
    pub fn new(amps: Vec<Complex64>, tol: &Tolerances) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let state = StateVector {
            qubits: len.trailing_zeros(),
            amps,
        };
        let dev = (state.norm_sqr() - 1.0).abs();
        if dev > tol.norm {
            return Err(Error::NotNormalized(dev));
        }
        Ok(state)
    }

    /// Normalizes and wraps an amplitude vector.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NotNormalized(1.0));
        }
        Ok(StateVector {
            qubits: len.trailing_zeros(),
            amps: amps.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Computational basis state `|index>` on `qubits` qubits.
    pub fn basis(qubits: u32, index: usize) -> Self {
        let dim = 1usize << qubits;
        assert!(index < dim, "basis index out of range");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { qubits, amps }
    }

    pub fn zero_state(qubits: u32) -> Self {
        StateVector::basis(qubits, 0)
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        assert_eq!(self.qubits, other.qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Euclidean distance to another vector of the same dimension.
    pub fn euclidean_distance(&self, other: &StateVector) -> f64 {
        assert_eq!(self.qubits, other.qubits);
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Views the amplitudes as a `2^left x 2^right` matrix (row index = the
    /// left register). This is a copy; the layouts agree, so it is cheap.
    pub fn as_matrix(&self, left_qubits: u32) -> CMatrix {
        assert!(left_qubits <= self.qubits);
        let rows = 1usize << left_qubits;
        let cols = 1usize << (self.qubits - left_qubits);
        CMatrix::from_vec(rows, cols, self.amps.clone())
    }

    pub fn from_matrix(m: CMatrix) -> Self {
        let len = m.rows() * m.cols();
        assert!(len.is_power_of_two());
        StateVector {
            qubits: len.trailing_zeros(),
            amps: m.into_vec(),
        }
    }

    /// Applies an operator to the leading (most significant) register.
    pub fn apply_left(&self, op: &CMatrix, left_qubits: u32) -> StateVector {
        assert_eq!(op.rows(), 1usize << left_qubits);
        let mat = self.as_matrix(left_qubits);
        StateVector::from_matrix(op.mul(&mat))
    }

    /// Applies an operator to the trailing (least significant) register.
    pub fn apply_right(&self, op: &CMatrix, right_qubits: u32) -> StateVector {
        assert_eq!(op.rows(), 1usize << right_qubits);
        let mat = self.as_matrix(self.qubits - right_qubits);
        StateVector::from_matrix(mat.mul(&op.transpose()))
    }

    /// Applies a `w`-qubit operator to the listed qubits; `targets[0]` is the
    /// operator's own most significant qubit.
    pub fn apply_on_qubits(&self, op: &CMatrix, targets: &[usize]) -> StateVector {
        self.apply_controlled(op, targets, &[])
    }

    /// Applies an operator to `targets` on the subspace where every control
    /// qubit holds the stated bit; identity elsewhere.
    pub fn apply_controlled(
        &self,
        op: &CMatrix,
        targets: &[usize],
        controls: &[(usize, bool)],
    ) -> StateVector {
        let q = self.qubits;
        let w = targets.len();
        assert_eq!(op.rows(), 1usize << w, "operator does not fit target count");
        assert!(op.is_square());
        let shifts: Vec<u32> = targets
            .iter()
            .map(|&p| {
                assert!((p as u32) < q, "target qubit out of range");
                q - 1 - p as u32
            })
            .collect();
        let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
        let mut control_mask = 0usize;
        let mut control_value = 0usize;
        for &(p, bit) in controls {
            assert!((p as u32) < q, "control qubit out of range");
            let m = 1usize << (q - 1 - p as u32);
            assert!(m & target_mask == 0, "control overlaps target");
            control_mask |= m;
            if bit {
                control_value |= m;
            }
        }
        let spread: Vec<usize> = (0..(1usize << w))
            .map(|x| {
                let mut out = 0usize;
                for (u, &s) in shifts.iter().enumerate() {
                    if (x >> (w - 1 - u)) & 1 == 1 {
                        out |= 1 << s;
                    }
                }
                out
            })
            .collect();

        let dim = self.amps.len();
        let mut out = self.amps.clone();
        let sub = 1usize << w;
        let mut gathered = vec![Complex64::new(0.0, 0.0); sub];
        for base in 0..dim {
            if base & target_mask != 0 {
                continue;
            }
            if base & control_mask != control_value {
                continue;
            }
            for x in 0..sub {
                gathered[x] = self.amps[base | spread[x]];
            }
            for x_out in 0..sub {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x_in, &g) in gathered.iter().enumerate() {
                    let v = op.get(x_out, x_in);
                    if v.re != 0.0 || v.im != 0.0 {
                        acc += v * g;
                    }
                }
                out[base | spread[x_out]] = acc;
            }
        }
        StateVector { qubits: q, amps: out }
    }

    /// Rearranges qubits: the qubit at position `perm[k]` moves to position
    /// `k` in the result.
    pub fn permute_qubits(&self, perm: &[usize]) -> StateVector {
        let q = self.qubits as usize;
        assert_eq!(perm.len(), q, "permutation length mismatch");
        let mut seen = vec![false; q];
        for &p in perm {
            assert!(p < q && !seen[p], "not a permutation");
            seen[p] = true;
        }
        let dim = self.amps.len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        // bit at new position k = bit at old position perm[k]
        let src_shift: Vec<u32> = perm.iter().map(|&p| (q - 1 - p) as u32).collect();
        for (old_idx, &amp) in self.amps.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let mut new_idx = 0usize;
            for (k, &s) in src_shift.iter().enumerate() {
                if (old_idx >> s) & 1 == 1 {
                    new_idx |= 1 << (q - 1 - k);
                }
            }
            out[new_idx] = amp;
        }
        StateVector { qubits: self.qubits, amps: out }
    }

    /// Probability that the given qubit reads 1 in the computational basis.
    pub fn probability_of_one(&self, qubit: usize) -> f64 {
        let shift = self.qubits as usize - 1 - qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| (i >> shift) & 1 == 1)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

impl std::fmt::Debug for StateVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StateVector({} qubits) [", self.qubits)?;
        let show = self.amps.len().min(8);
        for (i, z) in self.amps.iter().take(show).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:+.4}{:+.4}i", z.re, z.im)?;
        }
        if self.amps.len() > show {
            write!(f, ", ...")?;
        }
        write!(f, "]")
    }
}

/// Tensor product; `a`'s qubits become the most significant.
pub fn tensor(a: &StateVector, b: &StateVector) -> StateVector {
    let qb = b.qubit_count();
    let mut amps = vec![Complex64::new(0.0, 0.0); a.dim() * b.dim()];
    for (i, &x) in a.amplitudes().iter().enumerate() {
        if x.re == 0.0 && x.im == 0.0 {
            continue;
        }
        let base = i << qb;
        for (j, &y) in b.amplitudes().iter().enumerate() {
            amps[base | j] = x * y;
        }
    }
    StateVector {
        qubits: a.qubit_count() + qb,
        amps,
    }
}
