//! Central tolerance and cap configuration.
//!
//! Every numeric tolerance used by the library lives here so that sweep
//! harnesses can tighten or loosen them uniformly instead of hunting for
//! magic numbers.

/// Numeric tolerances, one record shared by all modules.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// State normalization: deviation of the squared norm from 1.
    pub norm: f64,
    /// Norm deviation above which a state is rejected as input.
    pub norm_input: f64,
    /// Gram-matrix residual for orthonormal basis sets.
    pub orthonormal: f64,
    /// Euclidean error allowed when reconstructing a state from a
    /// decomposition.
    pub reconstruct: f64,
    /// Max-entry residual of `sum M_i^dag M_i - I` for a valid POVM.
    pub povm_residual: f64,
    /// Deviation of an outcome distribution's total mass from 1.
    pub prob_sum: f64,
    /// Branch probabilities below this are treated as zero: the branch is
    /// pruned and no post-measurement state is produced (the renormalized
    /// post-state is undefined at probability zero).
    pub prune: f64,
    /// Agreement required between two evaluation routes of the same value.
    pub value_agree: f64,
    /// Max-entry residual of `U^dag U - I` for a matrix accepted as unitary.
    pub unitary: f64,
    /// Schmidt coefficients at or below this are dropped from decompositions.
    pub schmidt_cutoff: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: 1e-10,
        norm_input: 1e-8,
        orthonormal: 1e-10,
        reconstruct: 1e-9,
        povm_residual: 1e-9,
        prob_sum: 1e-9,
        prune: 1e-15,
        value_agree: 1e-9,
        unitary: 1e-9,
        schmidt_cutoff: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DEFAULT
    }
}

/// Default cap on dense per-side qubit counts (2^(2*13) joint amplitudes).
///
/// Keeps an epsilon = 0.1 compilation of a one-qubit-per-side strategy
/// (n = 10, so 11 qubits per side) inside memory. Override per call, or via
/// `EMBEZZLE_DENSE_CAP` in the command-line tool.
pub const DEFAULT_DENSE_CAP: u32 = 13;
