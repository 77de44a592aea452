//! Structured selection of the largest product Schmidt coefficients.
//!
//! `mu (x) psi` has product coefficients `gamma_{j,i} = alpha_i / (C sqrt(j))`
//! on a grid that is sorted along both axes, so the `N = 2^n` largest entries
//! come off a frontier heap without materializing the grid.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qlin::{SchmidtDecomposition, StateVector};

use super::harmonic_norm;

/// The `N = 2^n` largest product coefficients of `mu (x) psi`, as ordered
/// 1-based `(j, i)` pairs with their `gamma` values (nonincreasing).
#[derive(Clone, Debug)]
pub struct EmbezzledSelection {
    n: u32,
    normalization: f64,
    pairs: Vec<(u64, usize)>,
    gammas: Vec<f64>,
}

#[derive(PartialEq)]
struct Cell {
    gamma: f64,
    j: u64,
    i: usize,
}

impl Eq for Cell {}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        // larger gamma first; ties broken toward smaller j, then smaller i
        self.gamma
            .partial_cmp(&other.gamma)
            .expect("gammas are finite")
            .then_with(|| other.j.cmp(&self.j))
            .then_with(|| other.i.cmp(&self.i))
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Frontier-heap selection of the `2^n` largest `gamma_{j,i}`.
///
/// `alpha` must be normalized and sorted nonincreasing (the coefficient list
/// of a Schmidt decomposition).
pub fn select_top_products(alpha: &[f64], n: u32) -> EmbezzledSelection {
    assert!(!alpha.is_empty(), "empty coefficient list");
    assert!(n >= 1 && n <= 30, "selection size 2^{n} is out of range");
    assert!(
        alpha.windows(2).all(|w| w[0] >= w[1]),
        "coefficients must be sorted nonincreasing"
    );
    let norm: f64 = alpha.iter().map(|a| a * a).sum();
    assert!((norm - 1.0).abs() < 1e-6, "coefficients must be normalized");

    let c = harmonic_norm(n).expect("n is in range");
    let rows = 1u64 << n; // j ranges over 1..=2^n
    let cols = alpha.len(); // i ranges over 1..=cols
    let count = 1usize << n;

    let gamma = |j: u64, i: usize| alpha[i - 1] / (c * (j as f64).sqrt());

    let mut heap = BinaryHeap::new();
    let mut seen: HashSet<(u64, usize)> = HashSet::new();
    heap.push(Cell { gamma: gamma(1, 1), j: 1, i: 1 });
    seen.insert((1, 1));

    let mut pairs = Vec::with_capacity(count);
    let mut gammas = Vec::with_capacity(count);
    while pairs.len() < count {
        let cell = heap.pop().expect("grid has at least 2^n cells");
        pairs.push((cell.j, cell.i));
        gammas.push(cell.gamma);
        if cell.j < rows && seen.insert((cell.j + 1, cell.i)) {
            heap.push(Cell { gamma: gamma(cell.j + 1, cell.i), j: cell.j + 1, i: cell.i });
        }
        if cell.i < cols && seen.insert((cell.j, cell.i + 1)) {
            heap.push(Cell { gamma: gamma(cell.j, cell.i + 1), j: cell.j, i: cell.i + 1 });
        }
    }
    EmbezzledSelection { n, normalization: c, pairs, gammas }
}

impl EmbezzledSelection {
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of selected pairs, `N = 2^n`.
    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    /// The constant `C`.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Ordered 1-based `(j, i)` pairs.
    pub fn pairs(&self) -> &[(u64, usize)] {
        &self.pairs
    }

    /// Selected `gamma` values, nonincreasing.
    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    /// Smallest selected value `gamma_(N)`.
    pub fn cutoff(&self) -> f64 {
        *self.gammas.last().expect("nonempty selection")
    }
}

/// The embezzled version `E(psi)`: the selection together with its source
/// decomposition. The stored state is the normalized rendering, with
/// coefficient `1/(C sqrt(r))` on the r-th selected pair.
#[derive(Clone, Debug)]
pub struct EmbezzledVersion {
    selection: EmbezzledSelection,
    source: SchmidtDecomposition,
}

/// Builds the n-th embezzled version of the state behind `source`.
pub fn embezzled_version(source: &SchmidtDecomposition, n: u32) -> Result<EmbezzledVersion> {
    if source.left_qubits() != source.right_qubits() {
        return Err(Error::DimensionMismatch(
            "embezzlement needs an evenly split bipartite state".into(),
        ));
    }
    let selection = select_top_products(source.coefficients(), n);
    Ok(EmbezzledVersion {
        selection,
        source: source.clone(),
    })
}

impl EmbezzledVersion {
    pub fn selection(&self) -> &EmbezzledSelection {
        &self.selection
    }

    pub fn source(&self) -> &SchmidtDecomposition {
        &self.source
    }

    /// Coefficient on the r-th selected pair (1-based): `1/(C sqrt(r))`.
    pub fn coefficient(&self, r: usize) -> f64 {
        1.0 / (self.selection.normalization * (r as f64).sqrt())
    }

    fn side_qubits(&self) -> (u32, u32) {
        (self.selection.n, self.source.left_qubits())
    }

    /// Dense rendering in product register order
    /// `[mu_A(n), mu_B(n), work_A(m), work_B(m)]`, the layout of
    /// `tensor(mu, psi)`.
    pub fn dense_product_order(&self, dense_cap: u32) -> Result<StateVector> {
        let (n, m) = self.side_qubits();
        if n + m > dense_cap {
            return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
        }
        let side = 1usize << n;
        let work = 1usize << m;
        let work_block = work * work;
        let mut amps = vec![Complex64::new(0.0, 0.0); side * side * work_block];
        for (r0, &(j, i)) in self.selection.pairs.iter().enumerate() {
            let coef = self.coefficient(r0 + 1);
            let left = self.source.left_basis()[i - 1].amplitudes();
            let right = self.source.right_basis()[i - 1].amplitudes();
            let base = (((j - 1) as usize * side) + (j - 1) as usize) * work_block;
            for (x, &l) in left.iter().enumerate() {
                if l.re == 0.0 && l.im == 0.0 {
                    continue;
                }
                for (y, &rv) in right.iter().enumerate() {
                    amps[base + x * work + y] += coef * l * rv;
                }
            }
        }
        StateVector::normalized(amps)
    }

    /// Dense rendering in bipartite register order
    /// `[mu_A(n), work_A(m) | mu_B(n), work_B(m)]`, Alice's side first.
    pub fn dense_bipartite(&self, dense_cap: u32) -> Result<StateVector> {
        let (n, m) = self.side_qubits();
        let product = self.dense_product_order(dense_cap)?;
        Ok(product.permute_qubits(&product_to_bipartite_permutation(n, m)))
    }

    /// Closed-form fidelity with `mu (x) psi`; see
    /// [`super::embezzlement_fidelity`].
    pub fn fidelity(&self) -> f64 {
        fidelity_of_selection(&self.selection, self.source.coefficients())
    }
}

/// Qubit permutation sending `[mu_A, mu_B, work_A, work_B]` to
/// `[mu_A, work_A, mu_B, work_B]`.
pub fn product_to_bipartite_permutation(n: u32, m: u32) -> Vec<usize> {
    let (n, m) = (n as usize, m as usize);
    let mut perm = Vec::with_capacity(2 * (n + m));
    perm.extend(0..n); // mu_A
    perm.extend(2 * n..2 * n + m); // work_A
    perm.extend(n..2 * n); // mu_B
    perm.extend(2 * n + m..2 * n + 2 * m); // work_B
    perm
}

pub(super) fn fidelity_of_selection(selection: &EmbezzledSelection, alpha: &[f64]) -> f64 {
    let c2 = selection.normalization * selection.normalization;
    // compensated sum: terms are positive and decay slowly
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for (r0, &(j, i)) in selection.pairs.iter().enumerate() {
        let r = (r0 + 1) as f64;
        let term = alpha[i - 1] / (j as f64 * r).sqrt() - carry;
        let next = sum + term;
        carry = (next - sum) - term;
        sum = next;
    }
    sum / c2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Tolerances;
    use crate::qlin::{gates, overlap, schmidt_decompose, tensor};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: Tolerances = Tolerances::DEFAULT;

    fn rank_one_source(m: u32) -> SchmidtDecomposition {
        let theta = StateVector::zero_state(m);
        SchmidtDecomposition::from_parts(vec![1.0], vec![theta.clone()], vec![theta]).unwrap()
    }

    fn epr_source() -> SchmidtDecomposition {
        schmidt_decompose(&gates::epr(), 1, &TOL).unwrap()
    }

    fn random_alpha(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        let mut a: Vec<f64> = (0..len).map(|_| rng.gen::<f64>() + 1e-3).collect();
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in a.iter_mut() {
            *x /= norm;
        }
        a.sort_by(|x, y| y.partial_cmp(x).unwrap());
        a
    }

    #[test]
    fn rank_one_selection_walks_down_the_single_column() {
        let sel = select_top_products(&[1.0], 3);
        let expect: Vec<(u64, usize)> = (1..=8).map(|j| (j, 1)).collect();
        assert_eq!(sel.pairs(), expect.as_slice());
    }

    #[test]
    fn epr_selection_breaks_the_tie_toward_smaller_j() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sel = select_top_products(&[r, r], 1);
        // the four-cell grid has gamma(1,1) = gamma(1,2) > gamma(2,*)
        assert_eq!(sel.pairs(), &[(1, 1), (1, 2)]);
    }

    #[test]
    fn selection_matches_dense_grid_sort() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..5 {
            let alpha = random_alpha(&mut rng, 8); // m = 3
            let n = 6;
            let sel = select_top_products(&alpha, n);
            let c = harmonic_norm(n).unwrap();
            let mut grid: Vec<f64> = Vec::new();
            for j in 1..=(1u64 << n) {
                for a in &alpha {
                    grid.push(a / (c * (j as f64).sqrt()));
                }
            }
            grid.sort_by(|a, b| b.partial_cmp(a).unwrap());
            grid.truncate(1 << n);
            for (got, want) in sel.gammas().iter().zip(&grid) {
                assert!((got - want).abs() < 1e-14);
            }
            // gammas nonincreasing
            assert!(sel.gammas().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn omitted_cells_never_beat_the_cutoff() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let alpha = random_alpha(&mut rng, 8);
        let n = 6;
        let sel = select_top_products(&alpha, n);
        let chosen: HashSet<(u64, usize)> = sel.pairs().iter().copied().collect();
        let c = sel.normalization();
        let cutoff = sel.cutoff();
        let mut checked = 0;
        while checked < 1000 {
            let j = rng.gen_range(1..=(1u64 << n));
            let i = rng.gen_range(1..=alpha.len());
            if chosen.contains(&(j, i)) {
                continue;
            }
            let gamma = alpha[i - 1] / (c * (j as f64).sqrt());
            assert!(gamma <= cutoff + 1e-15);
            checked += 1;
        }
    }

    #[test]
    fn rank_one_embezzled_version_is_mu_with_a_product_tail() {
        let source = rank_one_source(2);
        let version = embezzled_version(&source, 3).unwrap();
        let dense = version.dense_product_order(13).unwrap();
        let mu = super::super::mu_state(3, 13).unwrap();
        let theta = StateVector::zero_state(2);
        let expect = tensor(&mu, &tensor(&theta, &theta));
        assert!(dense.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn dense_rendering_is_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for (m, n) in [(1u32, 4u32), (2, 4)] {
            let state = crate::qlin::random::random_state(2 * m, &mut rng);
            let source = schmidt_decompose(&state, m, &TOL).unwrap();
            let version = embezzled_version(&source, n).unwrap();
            let dense = version.dense_product_order(13).unwrap();
            assert!((dense.norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn embezzled_version_schmidt_spectrum_is_mu_shaped() {
        let source = epr_source();
        let n = 3;
        let version = embezzled_version(&source, n).unwrap();
        let dense = version.dense_bipartite(13).unwrap();
        let dec = schmidt_decompose(&dense, n + 1, &TOL).unwrap();
        let c = harmonic_norm(n).unwrap();
        let expect: Vec<f64> = (1..=(1usize << n)).map(|r| 1.0 / (c * (r as f64).sqrt())).collect();
        assert_eq!(dec.rank(), expect.len());
        for (got, want) in dec.coefficients().iter().zip(&expect) {
            assert!((got - want).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_fidelity_matches_dense_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for (m, n) in [(1u32, 2u32), (1, 6), (2, 4), (3, 3)] {
            let state = crate::qlin::random::random_state(2 * m, &mut rng);
            let source = schmidt_decompose(&state, m, &TOL).unwrap();
            let version = embezzled_version(&source, n).unwrap();
            let dense_e = version.dense_product_order(13).unwrap();
            let mu = super::super::mu_state(n, 13).unwrap();
            let psi = source.reconstruct();
            let reference = tensor(&mu, &psi);
            let ov = overlap(&reference, &dense_e).unwrap();
            assert!((version.fidelity() - ov.re).abs() < 1e-10, "(m,n)=({m},{n})");
            assert!(ov.im.abs() < 1e-10);
        }
    }

    #[test]
    fn fidelity_is_monotone_in_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for m in [1u32, 2] {
            let state = crate::qlin::random::random_state(2 * m, &mut rng);
            let source = schmidt_decompose(&state, m, &TOL).unwrap();
            let mut previous = 0.0;
            for n in 1..=8 {
                let f = super::super::embezzlement_fidelity(&source, n);
                assert!(f >= previous - 1e-12, "m={m} n={n}: {f} < {previous}");
                previous = f;
            }
        }
    }
}
