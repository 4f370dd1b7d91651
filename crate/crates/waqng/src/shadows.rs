//! Classical-shadow acquisition and overlap estimators.
//!
//! Each snapshot measures every support qubit in a uniformly random Pauli
//! basis and reconstructs the single-qubit factor `3 U†|b><b|U - I`; the
//! snapshot's full estimator is the Kronecker product of its factors and is
//! unbiased for the reduced state. Overlaps `tr(ρσ)` are estimated from two
//! independent shadow sets by averaging `tr(ρ̂^(i) σ̂^(j))` over all pairs,
//! which factorizes as a per-qubit product of 2x2 traces.
//!
//! Basis rotations are fixed so the factor substitution is bit-exact:
//! X is measured after a Hadamard, Y after S† then Hadamard, Z directly.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{run, Circuit, CircuitError, Statevector, SHIFT};

#[derive(Debug, Error, PartialEq)]
pub enum ShadowError {
    #[error("support must be non-empty, sorted, in range, and duplicate-free")]
    BadSupport,
    #[error("snapshot count must be at least 1")]
    ZeroCount,
    #[error("shadow sets have different supports")]
    SupportMismatch,
    #[error("shadow sets share seed {0}; the overlap estimator needs independent sets")]
    SeedCollision(u64),
    #[error("parameter index {0} out of range")]
    ParamOutOfRange(usize),
    #[error("shot budget requires eps > 0 and 0 < delta < 1")]
    BadBudgetArgs,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Measurement basis of one qubit in one snapshot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasBasis {
    X,
    Y,
    Z,
}

/// One randomized measurement: a basis and an outcome bit per support qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub bases: Vec<MeasBasis>,
    pub outcomes: Vec<u8>,
}

/// A batch of snapshots taken from one state on one support.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowSet {
    support: Vec<usize>,
    snapshots: Vec<Snapshot>,
    seed: u64,
}

impl ShadowSet {
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }
}

/// Splitmix-style seed derivation for independent sampling streams.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E3779B97F4A7C15)
        .wrapping_add(stream.wrapping_mul(0xBF58476D1CE4E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

fn check_support(support: &[usize], n_qubits: usize) -> Result<(), ShadowError> {
    if support.is_empty()
        || support.windows(2).any(|w| w[0] >= w[1])
        || *support.last().unwrap() >= n_qubits
    {
        return Err(ShadowError::BadSupport);
    }
    Ok(())
}

const INV_SQRT2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn hadamard() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(INV_SQRT2, 0.0);
    [[h, h], [h, -h]]
}

/// H·S†: rotates the Y eigenbasis onto the computational basis.
fn y_rotation() -> [[Complex64; 2]; 2] {
    let h = Complex64::new(INV_SQRT2, 0.0);
    let mi = Complex64::new(0.0, -1.0);
    [[h, h * mi], [h, -h * mi]]
}

/// Sample snapshots of a prepared state. The full state is measured and the
/// marginal bits on `support` are kept, which equals sampling the reduced
/// state in the chosen bases.
pub fn collect_shadows_of_state(
    state: &Statevector,
    support: &[usize],
    count: usize,
    seed: u64,
) -> Result<ShadowSet, ShadowError> {
    check_support(support, state.n_qubits())?;
    if count == 0 {
        return Err(ShadowError::ZeroCount);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut snapshots = Vec::with_capacity(count);
    for _ in 0..count {
        let bases: Vec<MeasBasis> = (0..support.len())
            .map(|_| match rng.gen_range(0..3u8) {
                0 => MeasBasis::X,
                1 => MeasBasis::Y,
                _ => MeasBasis::Z,
            })
            .collect();
        let mut rotated = state.clone();
        for (&q, basis) in support.iter().zip(&bases) {
            match basis {
                MeasBasis::X => rotated.apply_one_qubit_unitary(q, hadamard()),
                MeasBasis::Y => rotated.apply_one_qubit_unitary(q, y_rotation()),
                MeasBasis::Z => {}
            }
        }
        // One joint Born sample.
        let u: f64 = rng.gen();
        let mut cumulative = 0.0;
        let mut outcome_index = rotated.amplitudes().len() - 1;
        for (b, amp) in rotated.amplitudes().iter().enumerate() {
            cumulative += amp.norm_sqr();
            if u < cumulative {
                outcome_index = b;
                break;
            }
        }
        let outcomes: Vec<u8> = support
            .iter()
            .map(|&q| ((outcome_index >> q) & 1) as u8)
            .collect();
        snapshots.push(Snapshot { bases, outcomes });
    }
    Ok(ShadowSet {
        support: support.to_vec(),
        snapshots,
        seed,
    })
}

/// Sample snapshots of the circuit's output state.
pub fn collect_shadows(
    circuit: &Circuit,
    params: &[f64],
    support: &[usize],
    count: usize,
    seed: u64,
) -> Result<ShadowSet, ShadowError> {
    let state = run(circuit, params)?;
    collect_shadows_of_state(&state, support, count, seed)
}

/// Per-qubit factors `3 U†|b><b|U - I` of one snapshot. The snapshot's full
/// matrix is their Kronecker product (never materialized for k > 6).
pub fn snapshot_factors(s: &Snapshot) -> Vec<[[Complex64; 2]; 2]> {
    s.bases
        .iter()
        .zip(&s.outcomes)
        .map(|(basis, &bit)| single_factor(*basis, bit))
        .collect()
}

fn single_factor(basis: MeasBasis, bit: u8) -> [[Complex64; 2]; 2] {
    let re = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    match basis {
        // 3|0><0| - I = diag(2,-1); outcome 1 swaps the diagonal.
        MeasBasis::Z => [
            [re(0.5 + 1.5 * sign), re(0.0)],
            [re(0.0), re(0.5 - 1.5 * sign)],
        ],
        // 3|±><±| - I
        MeasBasis::X => [[re(0.5), re(1.5 * sign)], [re(1.5 * sign), re(0.5)]],
        // 3|±i><±i| - I
        MeasBasis::Y => [[re(0.5), im(-1.5 * sign)], [im(1.5 * sign), re(0.5)]],
    }
}

fn trace2(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Complex64 {
    a[0][0] * b[0][0] + a[0][1] * b[1][0] + a[1][0] * b[0][1] + a[1][1] * b[1][1]
}

/// Dense snapshot reconstruction ⊗ factors, for k small enough.
fn dense_snapshot(factors: &[[[Complex64; 2]; 2]]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(1.0, 0.0)];
    let mut dim = 1usize;
    // Kronecker accumulation keeping qubit j as bit j of row/column indices.
    for f in factors {
        let mut next = vec![Complex64::new(0.0, 0.0); 4 * dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let base = out[r * dim + c];
                for rb in 0..2 {
                    for cb in 0..2 {
                        next[((rb << factors_bit(dim)) | r) * (2 * dim)
                            + ((cb << factors_bit(dim)) | c)] = base * f[rb][cb];
                    }
                }
            }
        }
        out = next;
        dim *= 2;
    }
    out
}

fn factors_bit(dim: usize) -> usize {
    dim.trailing_zeros() as usize
}

const DENSE_MEAN_MAX_K: usize = 6;

/// Unbiased estimator of `tr(ρσ)` from two independent shadow sets:
/// the all-pairs average `(1/T_a T_b) Σ_ij tr(ρ̂^(i) σ̂^(j))`.
///
/// For k ≤ 6 the bilinear form collapses to `tr(ρ̄ σ̄)` of the dense mean
/// reconstructions, which is the same value at `O(T·4^k)` cost; larger
/// supports fall back to the factorized per-pair product to avoid `4^k`
/// memory.
pub fn estimate_overlap(a: &ShadowSet, b: &ShadowSet) -> Result<f64, ShadowError> {
    if a.support != b.support {
        return Err(ShadowError::SupportMismatch);
    }
    if a.seed == b.seed {
        return Err(ShadowError::SeedCollision(a.seed));
    }
    let k = a.support.len();
    if k <= DENSE_MEAN_MAX_K {
        let mean = |set: &ShadowSet| -> Vec<Complex64> {
            let dim = 1usize << k;
            let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
            for snap in &set.snapshots {
                let dense = dense_snapshot(&snapshot_factors(snap));
                for (slot, value) in acc.iter_mut().zip(dense) {
                    *slot += value;
                }
            }
            let t = set.snapshots.len() as f64;
            acc.into_iter().map(|z| z / t).collect()
        };
        let ma = mean(a);
        let mb = mean(b);
        let dim = 1usize << k;
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                acc += ma[r * dim + c] * mb[c * dim + r];
            }
        }
        Ok(acc.re)
    } else {
        let fa: Vec<Vec<[[Complex64; 2]; 2]>> = a.snapshots.iter().map(snapshot_factors).collect();
        let fb: Vec<Vec<[[Complex64; 2]; 2]>> = b.snapshots.iter().map(snapshot_factors).collect();
        let mut acc = 0.0;
        for sa in &fa {
            for sb in &fb {
                let mut product = Complex64::new(1.0, 0.0);
                for (qa, qb) in sa.iter().zip(sb.iter()) {
                    product *= trace2(qa, qb);
                }
                acc += product.re;
            }
        }
        Ok(acc / (fa.len() as f64 * fb.len() as f64))
    }
}

/// Shadow estimate of the parameter-shift combination
/// `𝒯_ij = (p̂₁ - p̂₂ - p̂₃ + p̂₄)/2` over the four states at
/// `θ ± π/2 e_i` and `θ ± π/2 e_j`.
///
/// Converges to `2 tr(∂_i ρ ∂_j ρ)`, i.e. twice the exact Hilbert-Schmidt
/// tensor entry; callers reconcile the factor of two explicitly.
pub fn estimate_metric_element(
    circuit: &Circuit,
    params: &[f64],
    i: usize,
    j: usize,
    support: &[usize],
    count: usize,
    seed: u64,
) -> Result<f64, ShadowError> {
    if i >= circuit.n_params() {
        return Err(ShadowError::ParamOutOfRange(i));
    }
    if j >= circuit.n_params() {
        return Err(ShadowError::ParamOutOfRange(j));
    }
    check_support(support, circuit.n_qubits())?;
    // The parameter-shift combination is symmetric in (i, j); canonicalizing
    // the order makes mirrored calls bitwise identical.
    let (i, j) = if i <= j { (i, j) } else { (j, i) };

    // Seeds are keyed by (parameter, shift sign, role); the role only
    // disambiguates the two sets of a diagonal element, so mirrored calls
    // (i,j) and (j,i) reuse identical sets and agree exactly.
    let set_for = |param: usize, sign: f64, role: u64| -> Result<ShadowSet, ShadowError> {
        let mut shifted = params.to_vec();
        shifted[param] += sign * SHIFT;
        let sign_bit = if sign > 0.0 { 0u64 } else { 1u64 };
        let role = if i == j { role } else { 0 };
        let stream = (param as u64) * 4 + sign_bit * 2 + role + 1;
        collect_shadows(circuit, &shifted, support, count, mix_seed(seed, stream))
    };

    let mut total = 0.0;
    for (si, sj, weight) in [
        (1.0, 1.0, 1.0),
        (1.0, -1.0, -1.0),
        (-1.0, 1.0, -1.0),
        (-1.0, -1.0, 1.0),
    ] {
        let set_a = set_for(i, si, 0)?;
        let set_b = set_for(j, sj, 1)?;
        total += weight * estimate_overlap(&set_a, &set_b)?;
    }
    Ok(total / 2.0)
}

/// Chebyshev shot budget for one metric element: four overlap terms, each
/// needing `T ≥ 2^(k+1) / (ε² δ)` snapshots.
pub fn shots_budget(k: usize, eps: f64, delta: f64) -> Result<u64, ShadowError> {
    let eps_ok = eps > 0.0;
    let delta_ok = delta > 0.0 && delta < 1.0;
    if !eps_ok || !delta_ok {
        return Err(ShadowError::BadBudgetArgs);
    }
    let per_term = 2f64.powi(k as i32 + 1) / (eps * eps * delta);
    Ok((4.0 * per_term).ceil() as u64)
}
