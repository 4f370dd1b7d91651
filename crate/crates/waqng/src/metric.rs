//! Metric tensors for natural-gradient updates.
//!
//! Three related objects live here:
//!
//! * the pure-state quantum Fisher information matrix
//!   `F_ij = 4 Re{<∂_i ψ|∂_j ψ> - <∂_i ψ|ψ><ψ|∂_j ψ>}`,
//! * the Hilbert-Schmidt metric tensor of a subsystem,
//!   `T_ij = tr(∂_i ρ ∂_j ρ)`, with `2T = F` at exact purity,
//! * the weighted metric `W = (2/Σ h_m²) Σ h_m² T_m`, summing the
//!   Hilbert-Schmidt tensors of each Hamiltonian term's support with
//!   squared-coefficient weights.
//!
//! `W` coincides with `F` whenever a single term acts globally, and always
//! satisfies the Gauss-Newton relation `W = 2 JᵀJ` for the residual of the
//! least-squares reformulation of the energy objective.
//!
//! State derivatives are computed by the exact ±π/2 parameter shift on full
//! statevectors and then partially traced; no finite differences enter.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{run, run_shifted, Circuit, CircuitError, Statevector, SHIFT};
use crate::pauli::Hamiltonian;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("support must be non-empty, sorted, in range, and duplicate-free")]
    BadSupport,
    #[error("parameter index {0} out of range")]
    ParamOutOfRange(usize),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("hamiltonian coefficient vector is zero")]
    ZeroCoefficients,
    #[error("matrix is not symmetric")]
    NonSymmetric,
    #[error("delta has length {got}, circuit expects {expected}")]
    DeltaLengthMismatch { got: usize, expected: usize },
    #[error("statevector dimensions differ")]
    DimensionMismatch,
    #[error("spectral config requires 0 < rcond < 1 and ridge >= 0")]
    BadSpectralConfig,
}

/// Reduced density matrix of a subsystem of `k` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    k: usize,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.diagonal().iter().sum()
    }

    /// tr(ρ²).
    pub fn purity(&self) -> f64 {
        trace_product(&self.entries, &self.entries)
    }
}

/// Real symmetric PSD `v x v` matrix over parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    entries: DMatrix<f64>,
}

impl MetricTensor {
    pub fn from_matrix(entries: DMatrix<f64>) -> Self {
        assert_eq!(entries.nrows(), entries.ncols());
        MetricTensor { entries }
    }

    pub fn zeros(v: usize) -> Self {
        MetricTensor {
            entries: DMatrix::zeros(v, v),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn min_eigenvalue(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        self.entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.norm()
    }

    /// `δᵀ M δ`.
    pub fn quadratic_form(&self, delta: &[f64]) -> f64 {
        let d = DVector::from_column_slice(delta);
        (d.transpose() * &self.entries * &d)[(0, 0)]
    }
}

/// Pseudo-inverse regularization: eigenvalues below `rcond * λ_max` are
/// zeroed; `ridge` adds a Tikhonov term before decomposition.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralConfig {
    pub rcond: f64,
    pub ridge: f64,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            rcond: 1e-8,
            ridge: 0.0,
        }
    }
}

impl SpectralConfig {
    pub fn validate(&self) -> Result<(), MetricError> {
        if self.rcond > 0.0 && self.rcond < 1.0 && self.ridge >= 0.0 {
            Ok(())
        } else {
            Err(MetricError::BadSpectralConfig)
        }
    }
}

fn check_support(support: &[usize], n_qubits: usize) -> Result<(), MetricError> {
    if support.is_empty()
        || support.windows(2).any(|w| w[0] >= w[1])
        || *support.last().unwrap() >= n_qubits
    {
        return Err(MetricError::BadSupport);
    }
    Ok(())
}

/// Re tr(AB) for equal-size complex matrices; real for Hermitian A, B.
fn trace_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..n {
        for c in 0..n {
            acc += a[(r, c)] * b[(c, r)];
        }
    }
    acc.re
}

/// Partial trace of |ψ><ψ| onto the listed qubits; the complement is traced
/// out. Row/column bit `j` of the result addresses qubit `support[j]`.
pub fn reduced_density(
    state: &Statevector,
    support: &[usize],
) -> Result<DensityMatrix, MetricError> {
    check_support(support, state.n_qubits())?;
    let k = support.len();
    let dim = 1usize << k;
    let n = state.n_qubits();
    let complement: Vec<usize> = (0..n).filter(|q| !support.contains(q)).collect();
    let env_dim = 1usize << complement.len();

    // Group amplitudes by environment assignment, then accumulate one outer
    // product per environment configuration.
    let mut grouped = vec![Complex64::new(0.0, 0.0); env_dim * dim];
    for (b, &amp) in state.amplitudes().iter().enumerate() {
        let mut a = 0usize;
        for (j, &q) in support.iter().enumerate() {
            a |= ((b >> q) & 1) << j;
        }
        let mut e = 0usize;
        for (j, &q) in complement.iter().enumerate() {
            e |= ((b >> q) & 1) << j;
        }
        grouped[e * dim + a] = amp;
    }
    let mut entries = DMatrix::zeros(dim, dim);
    for e in 0..env_dim {
        let block = &grouped[e * dim..(e + 1) * dim];
        for r in 0..dim {
            if block[r].norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..dim {
                entries[(r, c)] += block[r] * block[c].conj();
            }
        }
    }
    Ok(DensityMatrix { k, entries })
}

/// The pair of full states at `θ ± π/2 e_i` for every parameter. Shared by
/// every metric assembly at one `θ` so the circuit runs only `2v` times.
pub(crate) fn shifted_state_pairs(
    circuit: &Circuit,
    params: &[f64],
) -> Result<Vec<(Statevector, Statevector)>, CircuitError> {
    (0..circuit.n_params())
        .map(|i| {
            Ok((
                run_shifted(circuit, params, i, SHIFT)?,
                run_shifted(circuit, params, i, -SHIFT)?,
            ))
        })
        .collect()
}

fn rdm_derivative_from_pair(
    pair: &(Statevector, Statevector),
    support: &[usize],
) -> Result<DMatrix<Complex64>, MetricError> {
    let plus = reduced_density(&pair.0, support)?;
    let minus = reduced_density(&pair.1, support)?;
    Ok((plus.entries - minus.entries).map(|z| z * 0.5))
}

/// `∂_i ρ_m` by the exact parameter shift: `(ρ_m(θ+π/2 e_i) - ρ_m(θ-π/2 e_i))/2`.
/// Hermitian and traceless.
pub fn rdm_derivative(
    circuit: &Circuit,
    params: &[f64],
    i: usize,
    support: &[usize],
) -> Result<DMatrix<Complex64>, MetricError> {
    if i >= circuit.n_params() {
        return Err(MetricError::ParamOutOfRange(i));
    }
    check_support(support, circuit.n_qubits())?;
    let pair = (
        run_shifted(circuit, params, i, SHIFT)?,
        run_shifted(circuit, params, i, -SHIFT)?,
    );
    rdm_derivative_from_pair(&pair, support)
}

fn hs_tensor_from_pairs(
    pairs: &[(Statevector, Statevector)],
    support: &[usize],
) -> Result<MetricTensor, MetricError> {
    let v = pairs.len();
    let derivatives: Vec<DMatrix<Complex64>> = pairs
        .iter()
        .map(|pair| rdm_derivative_from_pair(pair, support))
        .collect::<Result<_, _>>()?;
    let mut entries = DMatrix::zeros(v, v);
    for i in 0..v {
        for j in i..v {
            let t = trace_product(&derivatives[i], &derivatives[j]);
            entries[(i, j)] = t;
            entries[(j, i)] = t;
        }
    }
    Ok(MetricTensor { entries })
}

/// Hilbert-Schmidt metric tensor `T_ij = tr(∂_i ρ_m ∂_j ρ_m)` of the
/// subsystem on `support`.
pub fn hs_tensor(
    circuit: &Circuit,
    params: &[f64],
    support: &[usize],
) -> Result<MetricTensor, MetricError> {
    check_support(support, circuit.n_qubits())?;
    let pairs = shifted_state_pairs(circuit, params)?;
    hs_tensor_from_pairs(&pairs, support)
}

/// Pure-state quantum Fisher information matrix. The state derivatives are
/// exact parameter-shift differences: with the `exp(-iφP/2)` rotation
/// convention, `|∂_i ψ> = (|ψ_{+i}> - |ψ_{-i}>) / (2√2)` since the ±π/2
/// shift difference equals `√2` times the derivative.
pub fn qfi_pure(circuit: &Circuit, params: &[f64]) -> Result<MetricTensor, MetricError> {
    let v = circuit.n_params();
    let state = run(circuit, params)?;
    let pairs = shifted_state_pairs(circuit, params)?;
    let scale = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
    let derivs: Vec<Statevector> = pairs
        .iter()
        .map(|(p, m)| {
            Statevector::from_amplitudes(
                p.amplitudes()
                    .iter()
                    .zip(m.amplitudes())
                    .map(|(a, b)| (a - b) * scale)
                    .collect(),
            )
        })
        .collect();
    let overlaps: Vec<Complex64> = derivs.iter().map(|d| d.inner(&state)).collect();
    let mut entries = DMatrix::zeros(v, v);
    for i in 0..v {
        for j in i..v {
            let term = derivs[i].inner(&derivs[j]) - overlaps[i].conj() * overlaps[j];
            let f = 4.0 * term.re;
            entries[(i, j)] = f;
            entries[(j, i)] = f;
        }
    }
    Ok(MetricTensor { entries })
}

/// The weighted metric `W = (2/Σ h_m²) Σ h_m² T_m`, with one Hilbert-Schmidt
/// tensor per distinct term support. Identity terms carry no subsystem and
/// contribute only to the normalization.
pub fn weighted_metric(
    circuit: &Circuit,
    params: &[f64],
    h: &Hamiltonian,
) -> Result<MetricTensor, MetricError> {
    let coeff_sq_sum = h.coeff_sq_sum();
    if coeff_sq_sum <= 0.0 {
        return Err(MetricError::ZeroCoefficients);
    }
    let v = circuit.n_params();
    let pairs = shifted_state_pairs(circuit, params)?;
    let mut per_support: Vec<(Vec<usize>, f64)> = Vec::new();
    for (coeff, string) in h.terms() {
        let support = string.support();
        if support.is_empty() {
            continue;
        }
        match per_support.iter_mut().find(|(s, _)| *s == support) {
            Some((_, weight)) => *weight += coeff * coeff,
            None => per_support.push((support, coeff * coeff)),
        }
    }
    let mut entries = DMatrix::zeros(v, v);
    for (support, weight) in &per_support {
        let tensor = hs_tensor_from_pairs(&pairs, support)?;
        entries += tensor.entries * (2.0 * weight / coeff_sq_sum);
    }
    Ok(MetricTensor { entries })
}

/// Spectral Moore-Penrose pseudo-inverse of a symmetric PSD matrix.
pub fn pinv_psd(m: &MetricTensor, cfg: &SpectralConfig) -> Result<DMatrix<f64>, MetricError> {
    cfg.validate()?;
    let v = m.dim();
    let a = m.entries();
    for r in 0..v {
        for c in r + 1..v {
            if (a[(r, c)] - a[(c, r)]).abs() > 1e-8 {
                return Err(MetricError::NonSymmetric);
            }
        }
    }
    if v == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let mut work = a.clone();
    for d in 0..v {
        work[(d, d)] += cfg.ridge;
    }
    let eig = work.symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l));
    let cutoff = cfg.rcond * lambda_max;
    let mut out = DMatrix::zeros(v, v);
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff && lambda > 0.0 {
            let col = eig.eigenvectors.column(idx);
            out += (col * col.transpose()) / lambda;
        }
    }
    Ok(out)
}

/// Residual vector and Jacobian of the least-squares reformulation of the
/// energy objective.
///
/// Per term `m`, the residual block is `h_m (vec(ρ_m) - vec(Ĥ_m)) / √(Σ h²)`
/// with `Ĥ_m = -H_m / h_m` restricted to the term's support; complex matrices
/// are vectorized as stacked real-then-imaginary parts so the Jacobian is
/// real. The weighted metric then satisfies `W = 2 JᵀJ`.
pub fn gauss_newton_residual_jacobian(
    circuit: &Circuit,
    params: &[f64],
    h: &Hamiltonian,
) -> Result<(DVector<f64>, DMatrix<f64>), MetricError> {
    let coeff_sq_sum = h.coeff_sq_sum();
    if coeff_sq_sum <= 0.0 {
        return Err(MetricError::ZeroCoefficients);
    }
    let scale = coeff_sq_sum.sqrt();
    let v = circuit.n_params();
    let state = run(circuit, params)?;
    let pairs = shifted_state_pairs(circuit, params)?;

    let mut residual_entries: Vec<f64> = Vec::new();
    let mut jacobian_rows: Vec<Vec<f64>> = Vec::new();

    let push_vec = |rows: &mut Vec<f64>, m: &DMatrix<Complex64>, factor: f64| {
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                rows.push(factor * m[(r, c)].re);
            }
        }
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                rows.push(factor * m[(r, c)].im);
            }
        }
    };

    for (coeff, string) in h.terms() {
        let support = string.support();
        if support.is_empty() {
            continue;
        }
        let rho = reduced_density(&state, &support)?;
        let dim = rho.entries().nrows();
        // Ĥ_m = -H_m / h_m on the support, matching the RDM's row ordering.
        let target_raw = string.support_matrix();
        let mut diff = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            for c in 0..dim {
                let target = -target_raw[r][c] / coeff;
                diff[(r, c)] = rho.entries()[(r, c)] - target;
            }
        }
        push_vec(&mut residual_entries, &diff, coeff / scale);

        let mut block_rows = vec![Vec::with_capacity(v); 2 * dim * dim];
        for pair in &pairs {
            let deriv = rdm_derivative_from_pair(pair, &support)?;
            let mut flat = Vec::with_capacity(2 * dim * dim);
            push_vec(&mut flat, &deriv, coeff / scale);
            for (row, value) in block_rows.iter_mut().zip(flat) {
                row.push(value);
            }
        }
        jacobian_rows.extend(block_rows);
    }

    let rows = jacobian_rows.len();
    let mut jacobian = DMatrix::zeros(rows, v);
    for (r, row) in jacobian_rows.iter().enumerate() {
        for (c, value) in row.iter().enumerate() {
            jacobian[(r, c)] = *value;
        }
    }
    Ok((DVector::from_vec(residual_entries), jacobian))
}

/// The weighted squared 2-norm distance between subsystem states at `θ` and
/// `θ + δ`: `(2/Σ h²) Σ h_m² ‖ρ_m(θ+δ) - ρ_m(θ)‖_F²`.
pub fn dw_distance(
    circuit: &Circuit,
    params: &[f64],
    delta: &[f64],
    h: &Hamiltonian,
) -> Result<f64, MetricError> {
    if delta.len() != circuit.n_params() {
        return Err(MetricError::DeltaLengthMismatch {
            got: delta.len(),
            expected: circuit.n_params(),
        });
    }
    let coeff_sq_sum = h.coeff_sq_sum();
    if coeff_sq_sum <= 0.0 {
        return Err(MetricError::ZeroCoefficients);
    }
    let moved: Vec<f64> = params.iter().zip(delta).map(|(p, d)| p + d).collect();
    let state_a = run(circuit, params)?;
    let state_b = run(circuit, &moved)?;
    let mut total = 0.0;
    for (coeff, string) in h.terms() {
        let support = string.support();
        if support.is_empty() {
            continue;
        }
        let rho_a = reduced_density(&state_a, &support)?;
        let rho_b = reduced_density(&state_b, &support)?;
        let diff = rho_b.entries() - rho_a.entries();
        total += coeff * coeff * diff.iter().map(|z| z.norm_sqr()).sum::<f64>();
    }
    Ok(2.0 * total / coeff_sq_sum)
}

/// Pure-state fidelity distance `1 - |<a|b>|²`, clamped to [0, 1].
pub fn fidelity_distance_pure(a: &Statevector, b: &Statevector) -> Result<f64, MetricError> {
    if a.n_qubits() != b.n_qubits() {
        return Err(MetricError::DimensionMismatch);
    }
    Ok((1.0 - a.inner(b).norm_sqr()).clamp(0.0, 1.0))
}
