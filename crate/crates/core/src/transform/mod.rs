//! Compiling strategies onto embezzlement catalysts.
//!
//! Any `2m`-qubit strategy `(psi, X, Y)` becomes a strategy whose shared
//! state is `mu_{2n} (x) |1>_m |1>_m` with `n = ceil(m / epsilon)`: lift the
//! operators with an identity on the catalyst half, then conjugate each
//! side by its embezzling unitary. The compiled value stays within
//! `sqrt(2 epsilon)` of the original.

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::embezzle::{catalyst_side, embezzle_unitaries, harmonic_norm, mu_state,
    product_to_bipartite_permutation};
use crate::error::{Error, Result};
use crate::games::{
    run_quantum_game, strategy_value, Circuit, CircuitStrategy, ClassicalGame, PovmStrategy,
    QuantumGame,
};
use crate::qlin::{schmidt_decompose, tensor, CMatrix, StateVector};

/// A compiled strategy: the catalyst-backed POVM strategy together with its
/// provenance and the qubit accounting (the stated `2m(1 + 1/epsilon)`
/// versus the `2(n + m)` the construction actually uses).
#[derive(Clone, Debug)]
pub struct TransformedStrategy {
    pub epsilon: f64,
    pub n: u32,
    pub strategy: PovmStrategy,
    pub original: PovmStrategy,
    pub stated_qubits: u32,
    pub actual_qubits: u32,
}

/// Shared state `mu_{2n} (x) |1>_m |1>_m` in bipartite order
/// `[mu_A, work_A | mu_B, work_B]`.
pub fn catalyst_shared_state(n: u32, m: u32, tol: &Tolerances) -> Result<StateVector> {
    let side = 1usize << (n + m);
    let work = 1usize << m;
    let c = harmonic_norm(n)?;
    let mut amps = vec![Complex64::new(0.0, 0.0); side * side];
    for j in 1..=(1usize << n) {
        let idx = (j - 1) * work;
        amps[idx * side + idx] = Complex64::new(1.0 / (c * (j as f64).sqrt()), 0.0);
    }
    StateVector::new(amps, tol)
}

/// Tensors every prover operator with an identity on the catalyst half and
/// pairs the result with `mu (x) psi`. The value is exactly preserved.
pub fn lift(strat: &PovmStrategy, n: u32, dense_cap: u32) -> Result<PovmStrategy> {
    if n == 0 {
        return Ok(strat.clone());
    }
    let m = strat.side_qubits();
    if n + m > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
    }
    let mu = mu_state(n, dense_cap)?;
    let product = tensor(&mu, strat.shared_state());
    let shared = product.permute_qubits(&product_to_bipartite_permutation(n, m));
    let eye = CMatrix::identity(1 << n);
    let alice = strat.alice.map_elements(|x| eye.kron(x))?;
    let bob = strat.bob.map_elements(|y| eye.kron(y))?;
    PovmStrategy::new(shared, alice, bob)
}

/// Compiles a strategy onto the embezzlement catalyst at loss budget
/// `epsilon`.
pub fn compile(
    strat: &PovmStrategy,
    epsilon: f64,
    dense_cap: u32,
    tol: &Tolerances,
) -> Result<TransformedStrategy> {
    let m = strat.side_qubits();
    let n = catalyst_side(m, epsilon)?;
    if n + m > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
    }
    let source = schmidt_decompose(strat.shared_state(), m, tol)?;
    let (u_a, u_b) = embezzle_unitaries(&source, n, dense_cap)?;
    let eye = CMatrix::identity(1 << n);
    let conj = |u: &CMatrix, op: &CMatrix| -> CMatrix {
        // u * (I (x) op) * u^dag; the block-diagonal factor goes first so the
        // sparse kernel path sees it
        u.mul(&eye.kron(op).mul(&u.dagger()))
    };
    let alice = strat.alice.map_elements(|x| conj(&u_a, x))?;
    let bob = strat.bob.map_elements(|y| conj(&u_b, y))?;
    let shared = catalyst_shared_state(n, m, tol)?;
    let strategy = PovmStrategy::new(shared, alice, bob)?;
    Ok(TransformedStrategy {
        epsilon,
        n,
        strategy,
        original: strat.clone(),
        stated_qubits: (2.0 * m as f64 * (1.0 + 1.0 / epsilon)).ceil() as u32,
        actual_qubits: 2 * (n + m),
    })
}

/// Outcome of checking the compiled value against `omega - sqrt(2 epsilon)`.
#[derive(Clone, Copy, Debug, serde::Serialize, serde::Deserialize)]
pub struct BoundReport {
    pub omega: f64,
    pub omega_prime: f64,
    pub epsilon: f64,
    pub n: u32,
    pub bound: f64,
    pub gap: f64,
    pub pass: bool,
}

fn bound_report(omega: f64, omega_prime: f64, epsilon: f64, n: u32, tol: &Tolerances) -> BoundReport {
    let bound = omega - (2.0 * epsilon).sqrt();
    BoundReport {
        omega,
        omega_prime,
        epsilon,
        n,
        bound,
        gap: omega_prime - bound,
        pass: omega_prime >= bound - tol.value_agree,
    }
}

/// Evaluates both strategies on the game and checks the value-loss bound.
pub fn verify_bound(
    game: &ClassicalGame,
    compiled: &TransformedStrategy,
    tol: &Tolerances,
) -> Result<BoundReport> {
    let omega = strategy_value(game, &compiled.original, tol)?;
    let omega_prime = strategy_value(game, &compiled.strategy, tol)?;
    Ok(bound_report(omega, omega_prime, compiled.epsilon, compiled.n, tol))
}

// --- circuit-strategy path -------------------------------------------------

/// A compiled circuit strategy; same algebra, prover privates widen by the
/// catalyst register (placed in front of the original private qubits).
#[derive(Clone, Debug)]
pub struct TransformedCircuitStrategy {
    pub epsilon: f64,
    pub n: u32,
    pub strategy: CircuitStrategy,
    pub original: CircuitStrategy,
    pub stated_qubits: u32,
    pub actual_qubits: u32,
}

fn widen_circuit(circuit: &Circuit, com: u32, n: u32, m: u32) -> CMatrix {
    // relocate an operator on [com, work] to [com, catalyst, work]
    let flat = circuit.flatten();
    let com_dim = 1usize << com;
    let cat_dim = 1usize << n;
    let work_dim = 1usize << m;
    let dim = com_dim * cat_dim * work_dim;
    let mut out = CMatrix::zeros(dim, dim);
    for c_out in 0..com_dim {
        for c_in in 0..com_dim {
            for w_out in 0..work_dim {
                for w_in in 0..work_dim {
                    let v = flat.get(c_out * work_dim + w_out, c_in * work_dim + w_in);
                    if v.re == 0.0 && v.im == 0.0 {
                        continue;
                    }
                    for cat in 0..cat_dim {
                        out.set(
                            (c_out * cat_dim + cat) * work_dim + w_out,
                            (c_in * cat_dim + cat) * work_dim + w_in,
                            v,
                        );
                    }
                }
            }
        }
    }
    out
}

/// Lifts a circuit strategy: shared state becomes `mu (x) psi` (catalyst
/// register first on each side), circuits act as the identity on it.
pub fn lift_circuit(
    strat: &CircuitStrategy,
    com_x: u32,
    com_y: u32,
    n: u32,
    dense_cap: u32,
    tol: &Tolerances,
) -> Result<CircuitStrategy> {
    let m = strat.priv_x;
    if strat.priv_y != m {
        return Err(Error::DimensionMismatch(
            "circuit lifting needs equal private register widths".into(),
        ));
    }
    if n == 0 {
        return Ok(strat.clone());
    }
    if n + m > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
    }
    let mu = mu_state(n, dense_cap)?;
    let product = tensor(&mu, &strat.shared_state);
    let shared = product.permute_qubits(&product_to_bipartite_permutation(n, m));
    let _ = tol;
    let widen_all = |circuits: &[Circuit], com: u32| -> Vec<Circuit> {
        circuits
            .iter()
            .map(|c| {
                let width = com + n + m;
                let full = widen_circuit(c, com, n, m);
                Circuit::new(width).dense((0..width as usize).collect(), full)
            })
            .collect()
    };
    Ok(CircuitStrategy {
        shared_state: shared,
        priv_x: n + m,
        priv_y: n + m,
        alice_circuits: widen_all(&strat.alice_circuits, com_x),
        bob_circuits: widen_all(&strat.bob_circuits, com_y),
    })
}

/// Compiles a circuit strategy onto the catalyst.
pub fn compile_circuit(
    strat: &CircuitStrategy,
    com_x: u32,
    com_y: u32,
    epsilon: f64,
    dense_cap: u32,
    tol: &Tolerances,
) -> Result<TransformedCircuitStrategy> {
    let m = strat.priv_x;
    if strat.priv_y != m {
        return Err(Error::DimensionMismatch(
            "circuit compilation needs equal private register widths".into(),
        ));
    }
    let n = catalyst_side(m, epsilon)?;
    if n + m > dense_cap {
        return Err(Error::DenseCapExceeded { needed: n + m, cap: dense_cap });
    }
    let source = schmidt_decompose(&strat.shared_state, m, tol)?;
    let (u_a, u_b) = embezzle_unitaries(&source, n, dense_cap)?;

    let conjugate_all = |circuits: &[Circuit], com: u32, u: &CMatrix| -> Vec<Circuit> {
        let eye_com = CMatrix::identity(1 << com);
        let rotor = eye_com.kron(u); // acts on [catalyst, work], identity on com
        circuits
            .iter()
            .map(|c| {
                let width = com + n + m;
                let lifted = widen_circuit(c, com, n, m);
                let conjugated = rotor.mul(&lifted.mul(&rotor.dagger()));
                Circuit::new(width).dense((0..width as usize).collect(), conjugated)
            })
            .collect()
    };
    let shared = catalyst_shared_state(n, m, tol)?;
    let strategy = CircuitStrategy {
        shared_state: shared,
        priv_x: n + m,
        priv_y: n + m,
        alice_circuits: conjugate_all(&strat.alice_circuits, com_x, &u_a),
        bob_circuits: conjugate_all(&strat.bob_circuits, com_y, &u_b),
    };
    Ok(TransformedCircuitStrategy {
        epsilon,
        n,
        strategy,
        original: strat.clone(),
        stated_qubits: (2.0 * m as f64 * (1.0 + 1.0 / epsilon)).ceil() as u32,
        actual_qubits: 2 * (n + m),
    })
}

/// Evaluates original and compiled circuit strategies on the game and checks
/// the value-loss bound.
pub fn verify_bound_circuit(
    game: &QuantumGame,
    compiled: &TransformedCircuitStrategy,
    tol: &Tolerances,
) -> Result<BoundReport> {
    let omega = run_quantum_game(game, &compiled.original, tol)?;
    let omega_prime = run_quantum_game(game, &compiled.strategy, tol)?;
    Ok(bound_report(omega, omega_prime, compiled.epsilon, compiled.n, tol))
}
