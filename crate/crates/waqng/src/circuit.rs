//! Dense statevector simulation of parameterized circuits.
//!
//! Rotation gates follow the convention `R_P(φ) = exp(-i φ P / 2)`, which
//! gives eigenvalue spacing 1 and makes the ±π/2 parameter-shift rule exact.
//!
//! The layered ansatz built by [`efficient_su2`] applies, per entangling
//! block, an RX layer, an RY layer, and a CNOT chain, with one final RX+RY
//! layer after the last block, so `n_params = 2n(layers + 1)`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::pauli::{expectation, Hamiltonian};

pub const SHIFT: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("parameter vector has length {got}, circuit expects {expected}")]
    ParamLengthMismatch { got: usize, expected: usize },
    #[error("qubit index {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("cnot control and target coincide on qubit {0}")]
    ControlEqualsTarget(usize),
    #[error("parameter index {0} used by more than one gate")]
    ParamReused(usize),
    #[error("parameter indices are not contiguous from 0")]
    ParamGap,
    #[error("circuit needs at least one qubit and one layer")]
    EmptyShape,
    #[error("parameter index {0} out of range")]
    ParamOutOfRange(usize),
}

/// One circuit gate. Rotations carry the index of the parameter they consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Rx { target: usize, param: usize },
    Ry { target: usize, param: usize },
    Rz { target: usize, param: usize },
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn param_index(&self) -> Option<usize> {
        match self {
            Gate::Rx { param, .. } | Gate::Ry { param, .. } | Gate::Rz { param, .. } => {
                Some(*param)
            }
            Gate::Cnot { .. } => None,
        }
    }
}

/// A parameterized gate list on a fixed register.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    /// Validates qubit ranges and that every parameter index in `0..n_params`
    /// is used by exactly one rotation gate.
    pub fn new(n_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        if n_qubits == 0 {
            return Err(CircuitError::EmptyShape);
        }
        let mut seen = Vec::new();
        for gate in &gates {
            match gate {
                Gate::Rx { target, .. } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => {
                    if *target >= n_qubits {
                        return Err(CircuitError::QubitOutOfRange(*target, n_qubits));
                    }
                }
                Gate::Cnot { control, target } => {
                    if *control >= n_qubits {
                        return Err(CircuitError::QubitOutOfRange(*control, n_qubits));
                    }
                    if *target >= n_qubits {
                        return Err(CircuitError::QubitOutOfRange(*target, n_qubits));
                    }
                    if control == target {
                        return Err(CircuitError::ControlEqualsTarget(*control));
                    }
                }
            }
            if let Some(p) = gate.param_index() {
                if seen.contains(&p) {
                    return Err(CircuitError::ParamReused(p));
                }
                seen.push(p);
            }
        }
        let n_params = seen.len();
        if seen.iter().any(|&p| p >= n_params) {
            return Err(CircuitError::ParamGap);
        }
        Ok(Circuit {
            n_qubits,
            gates,
            n_params,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }
}

/// Normalized complex amplitude vector of length `2^n`. Bit `q` of the
/// amplitude index (LSB = qubit 0) addresses qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn zero_state(n_qubits: usize) -> Self {
        Self::basis_state(n_qubits, 0)
    }

    /// |+>^n, handy in tests.
    pub fn uniform_plus(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Statevector {
            n_qubits,
            amplitudes: vec![amp; dim],
        }
    }

    /// Haar-ish random normalized state from a seeded generator (test support).
    pub fn random(n_qubits: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << n_qubits;
        let mut amplitudes: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        let n_qubits = amplitudes.len().trailing_zeros() as usize;
        assert_eq!(1usize << n_qubits, amplitudes.len());
        Statevector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// <self|other>.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn apply_single_qubit(&mut self, target: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << target;
        let dim = self.amplitudes.len();
        let mut b = 0usize;
        while b < dim {
            if b & bit == 0 {
                let lo = self.amplitudes[b];
                let hi = self.amplitudes[b | bit];
                self.amplitudes[b] = m[0][0] * lo + m[0][1] * hi;
                self.amplitudes[b | bit] = m[1][0] * lo + m[1][1] * hi;
            }
            b += 1;
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = 1usize << control;
        let tbit = 1usize << target;
        for b in 0..self.amplitudes.len() {
            if b & cbit != 0 && b & tbit == 0 {
                self.amplitudes.swap(b, b | tbit);
            }
        }
    }

    /// Apply an arbitrary 2x2 unitary to one qubit (used by the shadow
    /// measurement rotations).
    pub fn apply_one_qubit_unitary(&mut self, target: usize, m: [[Complex64; 2]; 2]) {
        self.apply_single_qubit(target, m);
    }
}

fn rx_matrix(phi: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((phi / 2.0).cos(), 0.0);
    let s = Complex64::new(0.0, -(phi / 2.0).sin());
    [[c, s], [s, c]]
}

fn ry_matrix(phi: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((phi / 2.0).cos(), 0.0);
    let s = Complex64::new((phi / 2.0).sin(), 0.0);
    [[c, -s], [s, c]]
}

fn rz_matrix(phi: f64) -> [[Complex64; 2]; 2] {
    let z = Complex64::new(0.0, 0.0);
    [
        [Complex64::from_polar(1.0, -phi / 2.0), z],
        [z, Complex64::from_polar(1.0, phi / 2.0)],
    ]
}

/// The layered hardware-efficient ansatz: per block an RX layer, an RY layer,
/// and a CNOT chain `(i, i+1)`, with a final RX+RY layer after the last block.
pub fn efficient_su2(n: usize, layers: usize) -> Result<Circuit, CircuitError> {
    if n == 0 || layers == 0 {
        return Err(CircuitError::EmptyShape);
    }
    let mut gates = Vec::new();
    let mut param = 0usize;
    let mut rotation_layer = |gates: &mut Vec<Gate>| {
        for q in 0..n {
            gates.push(Gate::Rx { target: q, param });
            param += 1;
        }
        for q in 0..n {
            gates.push(Gate::Ry { target: q, param });
            param += 1;
        }
    };
    for _ in 0..layers {
        rotation_layer(&mut gates);
        for i in 0..n.saturating_sub(1) {
            gates.push(Gate::Cnot {
                control: i,
                target: i + 1,
            });
        }
    }
    rotation_layer(&mut gates);
    Circuit::new(n, gates)
}

/// Run the circuit on |0...0>.
pub fn run(circuit: &Circuit, params: &[f64]) -> Result<Statevector, CircuitError> {
    if params.len() != circuit.n_params() {
        return Err(CircuitError::ParamLengthMismatch {
            got: params.len(),
            expected: circuit.n_params(),
        });
    }
    let mut state = Statevector::zero_state(circuit.n_qubits());
    for gate in circuit.gates() {
        match gate {
            Gate::Rx { target, param } => {
                state.apply_single_qubit(*target, rx_matrix(params[*param]))
            }
            Gate::Ry { target, param } => {
                state.apply_single_qubit(*target, ry_matrix(params[*param]))
            }
            Gate::Rz { target, param } => {
                state.apply_single_qubit(*target, rz_matrix(params[*param]))
            }
            Gate::Cnot { control, target } => state.apply_cnot(*control, *target),
        }
    }
    Ok(state)
}

/// State at `θ + shift·e_i`.
pub fn run_shifted(
    circuit: &Circuit,
    params: &[f64],
    i: usize,
    shift: f64,
) -> Result<Statevector, CircuitError> {
    if i >= circuit.n_params() {
        return Err(CircuitError::ParamOutOfRange(i));
    }
    let mut shifted = params.to_vec();
    shifted[i] += shift;
    run(circuit, &shifted)
}

/// Exact gradient of `f(θ) = <ψ(θ)|H|ψ(θ)>` via the ±π/2 parameter-shift rule:
/// `g_i = (f(θ + π/2 e_i) - f(θ - π/2 e_i)) / 2`.
pub fn grad_parameter_shift(
    circuit: &Circuit,
    params: &[f64],
    h: &Hamiltonian,
) -> Result<Vec<f64>, CircuitError> {
    if params.len() != circuit.n_params() {
        return Err(CircuitError::ParamLengthMismatch {
            got: params.len(),
            expected: circuit.n_params(),
        });
    }
    let mut grad = Vec::with_capacity(circuit.n_params());
    for i in 0..circuit.n_params() {
        let plus = run_shifted(circuit, params, i, SHIFT)?;
        let minus = run_shifted(circuit, params, i, -SHIFT)?;
        let fp = expectation(&plus, h).expect("dimensions checked");
        let fm = expectation(&minus, h).expect("dimensions checked");
        grad.push((fp - fm) / 2.0);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{build_model, parse_hamiltonian, ModelFamily};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ry_circuit() -> Circuit {
        Circuit::new(
            1,
            vec![Gate::Ry {
                target: 0,
                param: 0,
            }],
        )
        .unwrap()
    }

    #[test]
    fn efficient_su2_parameter_counts() {
        let c = efficient_su2(4, 1).unwrap();
        assert_eq!(c.n_params(), 16);
        let cnots = c
            .gates()
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count();
        assert_eq!(cnots, 3);

        let c = efficient_su2(2, 3).unwrap();
        assert_eq!(c.n_params(), 16);
        assert_eq!(
            c.gates()
                .iter()
                .filter(|g| matches!(g, Gate::Cnot { .. }))
                .count(),
            3
        );

        let c = efficient_su2(1, 2).unwrap();
        assert_eq!(c.n_params(), 6);
        assert!(c.gates().iter().all(|g| !matches!(g, Gate::Cnot { .. })));
    }

    #[test]
    fn efficient_su2_rejects_degenerate_shapes() {
        assert!(efficient_su2(0, 1).is_err());
        assert!(efficient_su2(2, 0).is_err());
    }

    #[test]
    fn circuit_validation_rejects_bad_gates() {
        assert_eq!(
            Circuit::new(
                2,
                vec![Gate::Cnot {
                    control: 1,
                    target: 1
                }]
            )
            .unwrap_err(),
            CircuitError::ControlEqualsTarget(1)
        );
        assert_eq!(
            Circuit::new(
                1,
                vec![Gate::Rx {
                    target: 3,
                    param: 0
                }]
            )
            .unwrap_err(),
            CircuitError::QubitOutOfRange(3, 1)
        );
        assert_eq!(
            Circuit::new(
                1,
                vec![
                    Gate::Rx {
                        target: 0,
                        param: 0
                    },
                    Gate::Ry {
                        target: 0,
                        param: 0
                    }
                ]
            )
            .unwrap_err(),
            CircuitError::ParamReused(0)
        );
        assert_eq!(
            Circuit::new(
                1,
                vec![Gate::Rx {
                    target: 0,
                    param: 1
                }]
            )
            .unwrap_err(),
            CircuitError::ParamGap
        );
    }

    #[test]
    fn zero_params_give_zero_state() {
        let c = efficient_su2(3, 1).unwrap();
        let s = run(&c, &vec![0.0; c.n_params()]).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].re, 1.0, epsilon = 1e-12);
        for amp in &s.amplitudes()[1..] {
            assert_abs_diff_eq!(amp.norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn ry_pi_flips_qubit() {
        let s = run(&ry_circuit(), &[std::f64::consts::PI]).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.amplitudes()[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn param_length_mismatch_is_error() {
        let c = efficient_su2(2, 1).unwrap();
        assert!(run(&c, &[0.0]).is_err());
        let h = build_model(ModelFamily::Ising, 2, None).unwrap();
        assert!(grad_parameter_shift(&c, &[0.0], &h).is_err());
    }

    #[test]
    fn ry_gradient_analytic() {
        // f(θ) = <ψ|Z|ψ> = cos θ for RY(θ)|0>.
        let h = parse_hamiltonian("1.0 Z0").unwrap();
        let g0 = grad_parameter_shift(&ry_circuit(), &[0.0], &h).unwrap();
        assert_abs_diff_eq!(g0[0], 0.0, epsilon = 1e-12);
        let g1 = grad_parameter_shift(&ry_circuit(), &[std::f64::consts::FRAC_PI_2], &h).unwrap();
        assert_abs_diff_eq!(g1[0], -1.0, epsilon = 1e-12);
    }

    fn finite_difference_grad(c: &Circuit, params: &[f64], h: &Hamiltonian) -> Vec<f64> {
        let step = 1e-5;
        (0..c.n_params())
            .map(|i| {
                let fp = crate::pauli::expectation(&run_shifted(c, params, i, step).unwrap(), h)
                    .unwrap();
                let fm = crate::pauli::expectation(&run_shifted(c, params, i, -step).unwrap(), h)
                    .unwrap();
                (fp - fm) / (2.0 * step)
            })
            .collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let c = efficient_su2(3, 1).unwrap();
        let h = build_model(ModelFamily::Heisenberg, 3, None).unwrap();
        let params = crate::optimizer::init_params(c.n_params(), 11);
        let g = grad_parameter_shift(&c, &params, &h).unwrap();
        let fd = finite_difference_grad(&c, &params, &h);
        for (a, b) in g.iter().zip(fd.iter()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-6);
        }
    }

    #[test]
    fn determinism_bitwise() {
        let c = efficient_su2(3, 2).unwrap();
        let params = crate::optimizer::init_params(c.n_params(), 5);
        let a = run(&c, &params).unwrap();
        let b = run(&c, &params).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    proptest! {
        #[test]
        fn norm_is_preserved(seed in 0u64..100, layers in 1usize..3, n in 1usize..5) {
            let c = efficient_su2(n, layers).unwrap();
            let params = crate::optimizer::init_params(c.n_params(), seed);
            let s = run(&c, &params).unwrap();
            prop_assert!((s.norm() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn two_pi_periodic_up_to_global_phase(seed in 0u64..50, which in 0usize..12) {
            let c = efficient_su2(2, 1).unwrap();
            let params = crate::optimizer::init_params(c.n_params(), seed);
            let i = which % c.n_params();
            let a = run(&c, &params).unwrap();
            let mut shifted = params.clone();
            shifted[i] += 2.0 * std::f64::consts::PI;
            let b = run(&c, &shifted).unwrap();
            prop_assert!((a.inner(&b).norm() - 1.0).abs() < 1e-10);
        }
    }
}
