//! Dense complex matrices.
//!
//! Row-major storage over `Complex64`. The multiply kernel skips rows and
//! entries that are exactly zero, which matters a lot here: shared states of
//! compiled strategies are sparse in the computational basis, and lifted
//! operators are block diagonal.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Work threshold (in multiply-adds) above which `mul` runs the parallel
/// split-plane kernel.
const PARALLEL_MUL_THRESHOLD: usize = 1 << 18;

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of `[re, im]` pairs. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        CMatrix { rows: r, cols: c, data }
    }

    /// Real matrix literal, handy for gates and tests.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        CMatrix {
            rows,
            cols,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Reinterprets a flat amplitude buffer as a matrix without copying
    /// semantics beyond the clone of the vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMatrix { rows, cols, data }
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.data
    }

    pub fn transpose(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j].conj();
            }
        }
        out
    }

    pub fn scale(&self, factor: Complex64) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.data[i * self.cols + i]).sum()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-entry residual of `U^dag U - I`; zero for an exact unitary.
    pub fn unitarity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.dagger().mul(self);
        gram.max_abs_diff(&CMatrix::identity(self.rows))
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_residual() <= tol
    }

    /// Matrix product. Rows of `self` and rows of `rhs` that are exactly zero
    /// are skipped, so block-diagonal and support-restricted operands cost
    /// what their nonzero structure suggests.
    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} times {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        if self.rows * self.cols * rhs.cols >= PARALLEL_MUL_THRESHOLD {
            return self.mul_large(rhs);
        }
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut out = CMatrix::zeros(m, n);
        for i in 0..m {
            let arow = self.row(i);
            let orow = &mut out.data[i * n..(i + 1) * n];
            for (kk, &c) in arow.iter().enumerate().take(k) {
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                let brow = &rhs.data[kk * n..(kk + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += c * b;
                }
            }
        }
        out
    }

    /// Parallel kernel on split real/imaginary planes; the planar inner loop
    /// auto-vectorizes where the interleaved complex loop does not.
    fn mul_large(&self, rhs: &CMatrix) -> CMatrix {
        let (m, k, n) = (self.rows, self.cols, rhs.cols);
        let mut b_re = vec![0.0f64; k * n];
        let mut b_im = vec![0.0f64; k * n];
        for (idx, z) in rhs.data.iter().enumerate() {
            b_re[idx] = z.re;
            b_im[idx] = z.im;
        }
        let nonzero_rows: Vec<usize> = (0..k)
            .filter(|&r| rhs.row(r).iter().any(|z| z.re != 0.0 || z.im != 0.0))
            .collect();
        let mut out = CMatrix::zeros(m, n);
        out.data
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(i, orow)| {
                let arow = &self.data[i * k..(i + 1) * k];
                if arow.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                    return;
                }
                let mut acc_re = vec![0.0f64; n];
                let mut acc_im = vec![0.0f64; n];
                for &kk in &nonzero_rows {
                    let c = arow[kk];
                    if c.re == 0.0 && c.im == 0.0 {
                        continue;
                    }
                    let br = &b_re[kk * n..kk * n + n];
                    let bi = &b_im[kk * n..kk * n + n];
                    for j in 0..n {
                        acc_re[j] += c.re * br[j] - c.im * bi[j];
                        acc_im[j] += c.re * bi[j] + c.im * br[j];
                    }
                }
                for (o, (re, im)) in orow.iter_mut().zip(acc_re.iter().zip(&acc_im)) {
                    *o = Complex64::new(*re, *im);
                }
            });
        out
    }

    /// Kronecker product; the left factor owns the more significant index
    /// bits, matching the register-order qubit convention.
    pub fn kron(&self, rhs: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.rows * rhs.rows, self.cols * rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.data[i * self.cols + j];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for p in 0..rhs.rows {
                    for q in 0..rhs.cols {
                        let v = a * rhs.data[p * rhs.cols + q];
                        out.data[(i * rhs.rows + p) * out.cols + (j * rhs.cols + q)] = v;
                    }
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, vector has length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in self.row(i).iter().zip(v) {
                acc += a * b;
            }
            out[i] = acc;
        }
        Ok(out)
    }

    /// Embeds an operator on `w` qubits into a `total`-qubit space, acting on
    /// the listed target qubits (register order: qubit 0 is the most
    /// significant index bit, and `targets[0]` carries the operator's own
    /// most significant bit).
    pub fn embed(&self, total: u32, targets: &[usize]) -> CMatrix {
        let w = targets.len();
        assert_eq!(self.rows, 1 << w, "operator size does not match target count");
        assert!(self.is_square());
        let dim = 1usize << total;
        let shifts: Vec<u32> = targets
            .iter()
            .map(|&p| {
                assert!((p as u32) < total, "target out of range");
                total - 1 - p as u32
            })
            .collect();
        let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
        // spread the operator's w-bit index onto the target bit positions
        let spread = |x: usize| -> usize {
            let mut out = 0usize;
            for (u, &s) in shifts.iter().enumerate() {
                if (x >> (w - 1 - u)) & 1 == 1 {
                    out |= 1 << s;
                }
            }
            out
        };
        let spread_table: Vec<usize> = (0..(1 << w)).map(spread).collect();
        let mut out = CMatrix::zeros(dim, dim);
        for base in 0..dim {
            if base & target_mask != 0 {
                continue;
            }
            for x_out in 0..(1 << w) {
                let i = base | spread_table[x_out];
                for x_in in 0..(1 << w) {
                    let j = base | spread_table[x_in];
                    out.data[i * dim + j] = self.data[x_out * self.rows + x_in];
                }
            }
        }
        out
    }
}

impl std::fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f, "{}", if self.cols > 8 { "..." } else { "" })?;
        }
        if self.rows > 8 {
            writeln!(f, "  ...")?;
        }
        write!(f, "]")
    }
}

// Serialized as row-major [re, im] pairs.
impl Serialize for CMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            rows: usize,
            cols: usize,
            data: Vec<[f64; 2]>,
            #[serde(skip)]
            _marker: std::marker::PhantomData<&'a ()>,
        }
        let repr = Repr {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
            _marker: std::marker::PhantomData,
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            rows: usize,
            cols: usize,
            data: Vec<[f64; 2]>,
        }
        let repr = Repr::deserialize(deserializer)?;
        if repr.data.len() != repr.rows * repr.cols {
            return Err(D::Error::custom(format!(
                "matrix payload has {} entries, expected {}",
                repr.data.len(),
                repr.rows * repr.cols
            )));
        }
        Ok(CMatrix {
            rows: repr.rows,
            cols: repr.cols,
            data: repr
                .data
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_small_matches_hand_computation() {
        let a = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 1.0)], vec![c(2.0, 0.0), c(0.0, 0.0)]]);
        let b = CMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]);
        let p = a.mul(&b);
        assert_eq!(p.get(0, 0), c(0.0, 1.0));
        assert_eq!(p.get(0, 1), c(1.0, 0.0));
        assert_eq!(p.get(1, 0), c(0.0, 0.0));
        assert_eq!(p.get(1, 1), c(2.0, 0.0));
    }

    #[test]
    fn parallel_kernel_agrees_with_naive() {
        let n = 96; // above the parallel threshold when cubed
        let a = CMatrix::from_fn(n, n, |i, j| c((i as f64 * 0.37).sin(), (j as f64 * 0.11).cos()));
        let b = CMatrix::from_fn(n, n, |i, j| c((i + 2 * j) as f64 * 1e-2, (i as f64 - j as f64) * 1e-2));
        let fast = a.mul(&b);
        let mut slow = CMatrix::zeros(n, n);
        for i in 0..n {
            for k in 0..n {
                let av = a.get(i, k);
                for j in 0..n {
                    let v = slow.get(i, j) + av * b.get(k, j);
                    slow.set(i, j, v);
                }
            }
        }
        assert!(fast.max_abs_diff(&slow) < 1e-12);
    }

    #[test]
    fn kron_basis_structure() {
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let i2 = CMatrix::identity(2);
        let xi = x.kron(&i2);
        // X (x) I swaps the most significant bit
        for col in 0..4 {
            for row in 0..4 {
                let expect = if row ^ 0b10 == col { 1.0 } else { 0.0 };
                assert_eq!(xi.get(row, col).re, expect);
            }
        }
    }

    #[test]
    fn embed_matches_kron_for_contiguous_targets() {
        let x = CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let h = CMatrix::from_real(
            2,
            2,
            &[
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
                std::f64::consts::FRAC_1_SQRT_2,
                -std::f64::consts::FRAC_1_SQRT_2,
            ],
        );
        let op = x.kron(&h);
        let embedded = op.embed(3, &[0, 1]);
        let direct = op.kron(&CMatrix::identity(2));
        assert!(embedded.max_abs_diff(&direct) < 1e-15);
        // reversed target order transposes the operator's qubit roles
        let swapped = op.embed(2, &[1, 0]);
        let expect = h.kron(&x);
        assert!(swapped.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn dagger_and_unitarity() {
        let s = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]]);
        assert!(s.is_unitary(1e-12));
        assert!(s.dagger().mul(&s).max_abs_diff(&CMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let a = CMatrix::from_rows(&[vec![c(1.0, -2.0), c(0.5, 0.0)], vec![c(0.0, 3.0), c(-1.0, 0.25)]]);
        let text = serde_json::to_string(&a).unwrap();
        let back: CMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
    }
}
