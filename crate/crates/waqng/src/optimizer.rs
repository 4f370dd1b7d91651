//! The three update rules and the VQE optimization loop.
//!
//! * vanilla:  `θ ← θ - η ∇f`
//! * QNG:      `θ ← θ - η F⁺ ∇f`  with `F` the pure-state Fisher matrix
//! * WA-QNG:   `θ ← θ - η W⁺ ∇f`  with `W` the weighted subsystem metric
//!
//! Gradient and metric are both evaluated at the current `θ` within one step.
//! Energies are tracked from exact statevector expectation values.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{grad_parameter_shift, run, Circuit, CircuitError};
use crate::metric::{pinv_psd, qfi_pure, weighted_metric, MetricError, SpectralConfig};
use crate::pauli::{expectation, hamiltonian_matrix, Hamiltonian, PauliError};

#[derive(Debug, Error)]
pub enum OptimizerError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("non-finite or divergent energy {energy} at step {step}")]
    DivergentEnergy { energy: f64, step: usize },
    #[error("run needs at least one step")]
    NoSteps,
}

/// Which update rule a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    Vanilla,
    Qng,
    Waqng,
}

impl std::str::FromStr for OptimizerKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vanilla" => Ok(OptimizerKind::Vanilla),
            "qng" => Ok(OptimizerKind::Qng),
            "waqng" => Ok(OptimizerKind::Waqng),
            other => Err(format!("unknown optimizer `{other}`")),
        }
    }
}

impl std::fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            OptimizerKind::Vanilla => "vanilla",
            OptimizerKind::Qng => "qng",
            OptimizerKind::Waqng => "waqng",
        })
    }
}

/// Per-step configuration shared by all update rules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepConfig {
    /// Learning rate η.
    pub lr: f64,
    pub spectral: SpectralConfig,
}

impl Default for StepConfig {
    fn default() -> Self {
        StepConfig {
            lr: 0.02,
            spectral: SpectralConfig::default(),
        }
    }
}

/// Energy trace and final parameters of one optimization run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub kind: OptimizerKind,
    pub seed: u64,
    /// Length `steps + 1`; index 0 is the initial energy.
    pub energies: Vec<f64>,
    pub final_params: Vec<f64>,
    pub config: StepConfig,
}

/// I.i.d. uniform initialization on [-1, 1], deterministic per seed.
pub fn init_params(n_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_params)
        .map(|_| rng.gen::<f64>() * 2.0 - 1.0)
        .collect()
}

/// One parameter update at `θ`.
pub fn step(
    kind: OptimizerKind,
    circuit: &Circuit,
    params: &[f64],
    h: &Hamiltonian,
    cfg: &StepConfig,
) -> Result<Vec<f64>, OptimizerError> {
    let grad = grad_parameter_shift(circuit, params, h)?;
    let direction: Vec<f64> = match kind {
        OptimizerKind::Vanilla => grad,
        OptimizerKind::Qng => {
            let f = qfi_pure(circuit, params)?;
            let pinv = pinv_psd(&f, &cfg.spectral)?;
            precondition(&pinv, &grad)
        }
        OptimizerKind::Waqng => {
            let w = weighted_metric(circuit, params, h)?;
            let pinv = pinv_psd(&w, &cfg.spectral)?;
            precondition(&pinv, &grad)
        }
    };
    Ok(params
        .iter()
        .zip(direction.iter())
        .map(|(p, d)| p - cfg.lr * d)
        .collect())
}

fn precondition(pinv: &DMatrix<f64>, grad: &[f64]) -> Vec<f64> {
    let g = DVector::from_column_slice(grad);
    (pinv * g).iter().copied().collect()
}

/// Run the full loop: initialize from `seed`, apply `step` `steps` times, and
/// record the energy before the first step and after each one.
pub fn run_vqe(
    circuit: &Circuit,
    h: &Hamiltonian,
    kind: OptimizerKind,
    cfg: &StepConfig,
    steps: usize,
    seed: u64,
) -> Result<RunRecord, OptimizerError> {
    if steps == 0 {
        return Err(OptimizerError::NoSteps);
    }
    // Impossible for exact evaluation; catches numerical corruption.
    let energy_bound = 10.0 * h.coeff_abs_sum();
    let mut params = init_params(circuit.n_params(), seed);
    let mut energies = Vec::with_capacity(steps + 1);

    let record_energy = |params: &[f64], step_no: usize| -> Result<f64, OptimizerError> {
        let state = run(circuit, params)?;
        let energy = expectation(&state, h)?;
        if !energy.is_finite() || energy.abs() > energy_bound {
            return Err(OptimizerError::DivergentEnergy {
                energy,
                step: step_no,
            });
        }
        Ok(energy)
    };

    energies.push(record_energy(&params, 0)?);
    for s in 1..=steps {
        params = step(kind, circuit, &params, h, cfg)?;
        energies.push(record_energy(&params, s)?);
    }
    Ok(RunRecord {
        kind,
        seed,
        energies,
        final_params: params,
        config: *cfg,
    })
}

pub const MAX_EIGENSOLVE_QUBITS: usize = 12;

/// Exact ground energy (and state) by dense Hermitian diagonalization.
pub fn ground_energy_exact(
    h: &Hamiltonian,
) -> Result<(f64, Option<Vec<Complex64>>), OptimizerError> {
    let n = h.n_qubits();
    if n > MAX_EIGENSOLVE_QUBITS {
        return Err(OptimizerError::Pauli(PauliError::TooLargeForDense {
            n,
            max: MAX_EIGENSOLVE_QUBITS,
        }));
    }
    let dense = hamiltonian_matrix(h)?;
    let dim = dense.len();
    let mut m = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            // Hermitian symmetrization guards against accumulation noise.
            m[(r, c)] = (dense[r][c] + dense[c][r].conj()) * 0.5;
        }
    }
    let eig = m.symmetric_eigen();
    let mut best = 0usize;
    for i in 1..dim {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    let vector: Vec<Complex64> = eig.eigenvectors.column(best).iter().copied().collect();
    Ok((eig.eigenvalues[best], Some(vector)))
}
