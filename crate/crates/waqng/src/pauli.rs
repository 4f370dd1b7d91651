//! Pauli-string algebra and k-local Hamiltonians.
//!
//! A Hamiltonian is a weighted sum of Pauli strings,
//!
//! ```text
//! H = Σ_m h_m H_m
//! ```
//!
//! where each `H_m` is a tensor product of single-qubit Pauli operators and
//! `h_m` is a real (possibly negative) coefficient. The locality `k` of a term
//! is the number of qubits on which it acts non-trivially.
//!
//! Qubit indexing is 0-based; amplitude index bit `q` (least-significant bit =
//! qubit 0) corresponds to qubit `q` throughout the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PauliError {
    #[error("malformed token `{0}`")]
    MalformedToken(String),
    #[error("duplicate qubit index {0} within one term")]
    DuplicateQubit(usize),
    #[error("empty term list")]
    EmptyTermList,
    #[error("term qubit count {term} does not match hamiltonian qubit count {expected}")]
    QubitCountMismatch { term: usize, expected: usize },
    #[error("non-finite coefficient")]
    NonFiniteCoefficient,
    #[error("unsupported model family `{0}`")]
    UnsupportedFamily(String),
    #[error("model `{family}` requires {requirement}")]
    BadModelArgs {
        family: &'static str,
        requirement: &'static str,
    },
    #[error("{n} qubits is too large for dense construction (max {max})")]
    TooLargeForDense { n: usize, max: usize },
    #[error("dimension mismatch: state has {state} qubits, hamiltonian has {ham}")]
    DimensionMismatch { state: usize, ham: usize },
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    I,
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn symbol(self) -> char {
        match self {
            PauliAxis::I => 'I',
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        }
    }

    /// Dense 2x2 matrix of the operator.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let z = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            PauliAxis::I => [[one, z], [z, one]],
            PauliAxis::X => [[z, one], [one, z]],
            PauliAxis::Y => [[z, -i], [i, z]],
            PauliAxis::Z => [[one, z], [z, -one]],
        }
    }
}

/// Tensor product of single-qubit Paulis on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    axes: Vec<PauliAxis>,
}

impl PauliString {
    pub fn new(axes: Vec<PauliAxis>) -> Self {
        assert!(!axes.is_empty(), "pauli string needs at least one qubit");
        PauliString {
            n_qubits: axes.len(),
            axes,
        }
    }

    /// Identity string on `n` qubits with the given (qubit, axis) assignments.
    pub fn from_ops(n: usize, ops: &[(usize, PauliAxis)]) -> Self {
        let mut axes = vec![PauliAxis::I; n];
        for &(q, a) in ops {
            assert!(q < n, "qubit index out of range");
            axes[q] = a;
        }
        PauliString { n_qubits: n, axes }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn axes(&self) -> &[PauliAxis] {
        &self.axes
    }

    /// Qubits on which the string acts non-trivially, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.axes
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != PauliAxis::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Locality `k = |support|`.
    pub fn locality(&self) -> usize {
        self.axes.iter().filter(|a| **a != PauliAxis::I).count()
    }

    /// Apply the string to a raw amplitude vector: `out = P |psi>`.
    ///
    /// Each Pauli string is a signed permutation with per-basis phases
    /// X: flip; Y: flip with phase ±i; Z: phase ±1.
    pub fn apply(&self, amplitudes: &[Complex64]) -> Vec<Complex64> {
        let dim = amplitudes.len();
        debug_assert_eq!(dim, 1 << self.n_qubits);
        let mut flip_mask: usize = 0;
        for (q, a) in self.axes.iter().enumerate() {
            if matches!(a, PauliAxis::X | PauliAxis::Y) {
                flip_mask |= 1 << q;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (b, &amp) in amplitudes.iter().enumerate() {
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, a) in self.axes.iter().enumerate() {
                let bit = (b >> q) & 1;
                match a {
                    PauliAxis::I | PauliAxis::X => {}
                    PauliAxis::Y => {
                        // Y|0> = i|1>, Y|1> = -i|0>
                        phase *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    PauliAxis::Z => {
                        if bit == 1 {
                            phase = -phase;
                        }
                    }
                }
            }
            out[b ^ flip_mask] += phase * amp;
        }
        out
    }

    /// Dense matrix of the string restricted to its own support, with
    /// `support[0]` as the least-significant row/column bit. Matches the
    /// row/column ordering of [`crate::metric::reduced_density`].
    pub fn support_matrix(&self) -> Vec<Vec<Complex64>> {
        let support = self.support();
        let k = support.len();
        let dim = 1 << k;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                let mut entry = Complex64::new(1.0, 0.0);
                for (j, &q) in support.iter().enumerate() {
                    let rb = (r >> j) & 1;
                    let cb = (c >> j) & 1;
                    entry *= self.axes[q].matrix()[rb][cb];
                }
                *cell = entry;
            }
        }
        m
    }
}

impl std::fmt::Display for PauliString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (q, a) in self.axes.iter().enumerate() {
            if *a == PauliAxis::I {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", a.symbol(), q)?;
            first = false;
        }
        if first {
            write!(f, "I")?;
        }
        Ok(())
    }
}

/// Weighted sum of Pauli strings on a shared qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(n_qubits: usize, terms: Vec<(f64, PauliString)>) -> Result<Self, PauliError> {
        if terms.is_empty() {
            return Err(PauliError::EmptyTermList);
        }
        for (h, s) in &terms {
            if !h.is_finite() {
                return Err(PauliError::NonFiniteCoefficient);
            }
            if s.n_qubits() != n_qubits {
                return Err(PauliError::QubitCountMismatch {
                    term: s.n_qubits(),
                    expected: n_qubits,
                });
            }
        }
        Ok(Hamiltonian { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    /// Σ_m h_m².
    pub fn coeff_sq_sum(&self) -> f64 {
        self.terms.iter().map(|(h, _)| h * h).sum()
    }

    /// Σ_m |h_m|, an upper bound on the spectral radius.
    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms.iter().map(|(h, _)| h.abs()).sum()
    }

    /// Maximum term locality.
    pub fn max_locality(&self) -> usize {
        self.terms
            .iter()
            .map(|(_, s)| s.locality())
            .max()
            .unwrap_or(0)
    }

    /// Uniformly rescaled Hamiltonian `c·H`.
    pub fn scaled(&self, c: f64) -> Hamiltonian {
        Hamiltonian {
            n_qubits: self.n_qubits,
            terms: self.terms.iter().map(|(h, s)| (c * h, s.clone())).collect(),
        }
    }

    /// Text serialization, round-tripping with [`parse_hamiltonian`].
    pub fn serialize(&self) -> String {
        let mut out = format!("qubits {}", self.n_qubits);
        for (h, s) in &self.terms {
            out.push_str("; ");
            out.push_str(&format!("{} {}", h, s));
        }
        out
    }
}

impl std::fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// Parse the semicolon-separated text format, e.g. `"1.0 Z0 Z1; -0.5 X2"`.
///
/// The qubit count is `max index + 1` unless an explicit `qubits N` header
/// appears as the first segment. A lone `I` token denotes an identity term.
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian, PauliError> {
    let mut segments: Vec<&str> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let mut declared_qubits = None;
    if let Some(first) = segments.first() {
        if let Some(rest) = first.strip_prefix("qubits") {
            let n: usize = rest
                .trim()
                .parse()
                .map_err(|_| PauliError::MalformedToken(first.to_string()))?;
            declared_qubits = Some(n);
            segments.remove(0);
        }
    }
    if segments.is_empty() {
        return Err(PauliError::EmptyTermList);
    }

    let mut raw_terms: Vec<(f64, Vec<(usize, PauliAxis)>)> = Vec::new();
    let mut max_index = 0usize;
    for segment in segments {
        let mut tokens = segment.split_whitespace();
        let coeff_tok = tokens.next().ok_or(PauliError::EmptyTermList)?;
        let coeff: f64 = coeff_tok
            .parse()
            .map_err(|_| PauliError::MalformedToken(coeff_tok.to_string()))?;
        if !coeff.is_finite() {
            return Err(PauliError::NonFiniteCoefficient);
        }
        let mut ops: Vec<(usize, PauliAxis)> = Vec::new();
        for tok in tokens {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let axis = match chars.next() {
                Some('X') => PauliAxis::X,
                Some('Y') => PauliAxis::Y,
                Some('Z') => PauliAxis::Z,
                _ => return Err(PauliError::MalformedToken(tok.to_string())),
            };
            let index: usize = chars
                .as_str()
                .parse()
                .map_err(|_| PauliError::MalformedToken(tok.to_string()))?;
            if ops.iter().any(|(q, _)| *q == index) {
                return Err(PauliError::DuplicateQubit(index));
            }
            max_index = max_index.max(index);
            ops.push((index, axis));
        }
        raw_terms.push((coeff, ops));
    }

    let n_qubits = declared_qubits.unwrap_or(max_index + 1).max(max_index + 1);
    let terms = raw_terms
        .into_iter()
        .map(|(h, ops)| (h, PauliString::from_ops(n_qubits, &ops)))
        .collect();
    Hamiltonian::new(n_qubits, terms)
}

/// The model families used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    /// Open-chain transverse-field Ising model: Σ Z_iZ_{i+1} + Σ X_i.
    Ising,
    /// Open-chain Heisenberg model: Σ (X_iX_{i+1} + Y_iY_{i+1} + Z_iZ_{i+1}).
    Heisenberg,
    /// 3-qubit toy model Z0Z1 + Z1Z2 + αX0 + (3−2α)X1 + αX2.
    WeightedAlpha,
}

impl std::str::FromStr for ModelFamily {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ising" => Ok(ModelFamily::Ising),
            "heisenberg" => Ok(ModelFamily::Heisenberg),
            "weighted_alpha" => Ok(ModelFamily::WeightedAlpha),
            other => Err(PauliError::UnsupportedFamily(other.to_string())),
        }
    }
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelFamily::Ising => "ising",
            ModelFamily::Heisenberg => "heisenberg",
            ModelFamily::WeightedAlpha => "weighted_alpha",
        })
    }
}

/// Build one of the benchmark Hamiltonians. Nearest-neighbor couplings form an
/// open chain `(i, i+1)` for `i = 0..n-2`.
pub fn build_model(
    family: ModelFamily,
    n: usize,
    alpha: Option<f64>,
) -> Result<Hamiltonian, PauliError> {
    if n < 2 {
        return Err(PauliError::BadModelArgs {
            family: "any",
            requirement: "n >= 2",
        });
    }
    match family {
        ModelFamily::Ising => {
            if alpha.is_some() {
                return Err(PauliError::BadModelArgs {
                    family: "ising",
                    requirement: "no alpha parameter",
                });
            }
            let mut terms = Vec::new();
            for i in 0..n - 1 {
                terms.push((
                    1.0,
                    PauliString::from_ops(n, &[(i, PauliAxis::Z), (i + 1, PauliAxis::Z)]),
                ));
            }
            for i in 0..n {
                terms.push((1.0, PauliString::from_ops(n, &[(i, PauliAxis::X)])));
            }
            Hamiltonian::new(n, terms)
        }
        ModelFamily::Heisenberg => {
            if alpha.is_some() {
                return Err(PauliError::BadModelArgs {
                    family: "heisenberg",
                    requirement: "no alpha parameter",
                });
            }
            let mut terms = Vec::new();
            for i in 0..n - 1 {
                for axis in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z] {
                    terms.push((1.0, PauliString::from_ops(n, &[(i, axis), (i + 1, axis)])));
                }
            }
            Hamiltonian::new(n, terms)
        }
        ModelFamily::WeightedAlpha => {
            if n != 3 {
                return Err(PauliError::BadModelArgs {
                    family: "weighted_alpha",
                    requirement: "n = 3",
                });
            }
            let alpha = alpha.ok_or(PauliError::BadModelArgs {
                family: "weighted_alpha",
                requirement: "an alpha value",
            })?;
            let terms = vec![
                (
                    1.0,
                    PauliString::from_ops(3, &[(0, PauliAxis::Z), (1, PauliAxis::Z)]),
                ),
                (
                    1.0,
                    PauliString::from_ops(3, &[(1, PauliAxis::Z), (2, PauliAxis::Z)]),
                ),
                (alpha, PauliString::from_ops(3, &[(0, PauliAxis::X)])),
                (
                    3.0 - 2.0 * alpha,
                    PauliString::from_ops(3, &[(1, PauliAxis::X)]),
                ),
                (alpha, PauliString::from_ops(3, &[(2, PauliAxis::X)])),
            ];
            Hamiltonian::new(3, terms)
        }
    }
}

pub const MAX_DENSE_QUBITS: usize = 14;

/// Dense `2^n x 2^n` matrix of a Pauli string (oracle support for small `n`).
pub fn pauli_matrix(string: &PauliString) -> Result<Vec<Vec<Complex64>>, PauliError> {
    let n = string.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(PauliError::TooLargeForDense {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for c in 0..dim {
        let mut basis = vec![Complex64::new(0.0, 0.0); dim];
        basis[c] = Complex64::new(1.0, 0.0);
        let col = string.apply(&basis);
        for (r, v) in col.into_iter().enumerate() {
            m[r][c] = v;
        }
    }
    Ok(m)
}

/// Dense matrix of a full Hamiltonian, Σ_m h_m H_m.
pub fn hamiltonian_matrix(h: &Hamiltonian) -> Result<Vec<Vec<Complex64>>, PauliError> {
    let n = h.n_qubits();
    if n > MAX_DENSE_QUBITS {
        return Err(PauliError::TooLargeForDense {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << n;
    let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
    for (coeff, string) in h.terms() {
        let term = pauli_matrix(string)?;
        for r in 0..dim {
            for c in 0..dim {
                m[r][c] += coeff * term[r][c];
            }
        }
    }
    Ok(m)
}

/// Exact expectation value `Σ_m h_m <psi|H_m|psi>`, evaluated term-by-term.
///
/// The imaginary residue (below 1e-10 for Hermitian terms) is discarded.
pub fn expectation(
    state: &crate::circuit::Statevector,
    h: &Hamiltonian,
) -> Result<f64, PauliError> {
    if state.n_qubits() != h.n_qubits() {
        return Err(PauliError::DimensionMismatch {
            state: state.n_qubits(),
            ham: h.n_qubits(),
        });
    }
    let amps = state.amplitudes();
    let mut total = 0.0;
    for (coeff, string) in h.terms() {
        let transformed = string.apply(amps);
        let mut value = Complex64::new(0.0, 0.0);
        for (a, t) in amps.iter().zip(transformed.iter()) {
            value += a.conj() * t;
        }
        total += coeff * value.re;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Statevector;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn parse_two_qubit_term() {
        let h = parse_hamiltonian("1.0 Z0 Z1").unwrap();
        assert_eq!(h.n_qubits(), 2);
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[0].0, 1.0);
        assert_eq!(h.terms()[0].1.support(), vec![0, 1]);
    }

    #[test]
    fn parse_negative_coefficient() {
        let h = parse_hamiltonian("-0.5 X2").unwrap();
        assert_eq!(h.n_qubits(), 3);
        assert_eq!(h.terms()[0].0, -0.5);
    }

    #[test]
    fn parse_duplicate_qubit_is_error() {
        assert_eq!(
            parse_hamiltonian("1.0 Z0 Z0").unwrap_err(),
            PauliError::DuplicateQubit(0)
        );
    }

    #[test]
    fn parse_empty_is_error() {
        assert_eq!(
            parse_hamiltonian("").unwrap_err(),
            PauliError::EmptyTermList
        );
        assert_eq!(
            parse_hamiltonian("qubits 3").unwrap_err(),
            PauliError::EmptyTermList
        );
    }

    #[test]
    fn parse_malformed_token_is_error() {
        assert!(matches!(
            parse_hamiltonian("1.0 Q0").unwrap_err(),
            PauliError::MalformedToken(_)
        ));
        assert!(matches!(
            parse_hamiltonian("abc Z0").unwrap_err(),
            PauliError::MalformedToken(_)
        ));
    }

    #[test]
    fn parse_header_overrides_qubit_count() {
        let h = parse_hamiltonian("qubits 5; 1.0 Z0").unwrap();
        assert_eq!(h.n_qubits(), 5);
    }

    #[test]
    fn round_trip_preserves_terms() {
        let text = "qubits 4; 1.0 Z0 Z1; -0.5 X2; 0.25 Y3; 2 I";
        let h = parse_hamiltonian(text).unwrap();
        let h2 = parse_hamiltonian(&h.serialize()).unwrap();
        assert_eq!(h, h2);
    }

    #[test]
    fn ising_structure() {
        let h = build_model(ModelFamily::Ising, 3, None).unwrap();
        assert_eq!(h.terms().len(), 5);
        assert!(h.terms().iter().all(|(c, _)| *c == 1.0));
        let localities: Vec<usize> = h.terms().iter().map(|(_, s)| s.locality()).collect();
        assert_eq!(localities, vec![2, 2, 1, 1, 1]);
    }

    #[test]
    fn heisenberg_structure() {
        let h = build_model(ModelFamily::Heisenberg, 2, None).unwrap();
        assert_eq!(h.terms().len(), 3);
        let axes: Vec<PauliAxis> = h.terms().iter().map(|(_, s)| s.axes()[0]).collect();
        assert_eq!(axes, vec![PauliAxis::X, PauliAxis::Y, PauliAxis::Z]);
        assert!(h.terms().iter().all(|(c, _)| *c == 1.0));
    }

    #[test]
    fn weighted_alpha_coefficients() {
        let h = build_model(ModelFamily::WeightedAlpha, 3, Some(0.5)).unwrap();
        let coeffs: Vec<f64> = h.terms().iter().map(|(c, _)| *c).collect();
        assert_eq!(coeffs, vec![1.0, 1.0, 0.5, 2.0, 0.5]);
    }

    #[test]
    fn weighted_alpha_needs_alpha_and_three_qubits() {
        assert!(build_model(ModelFamily::WeightedAlpha, 3, None).is_err());
        assert!(build_model(ModelFamily::WeightedAlpha, 4, Some(0.5)).is_err());
        assert!(build_model(ModelFamily::Ising, 4, Some(0.5)).is_err());
    }

    #[test]
    fn builders_are_two_local_open_chains() {
        for n in 2..=5 {
            let h = build_model(ModelFamily::Ising, n, None).unwrap();
            assert_eq!(h.max_locality(), 2);
            let pair_supports: Vec<Vec<usize>> = h
                .terms()
                .iter()
                .filter(|(_, s)| s.locality() == 2)
                .map(|(_, s)| s.support())
                .collect();
            let expected: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
            assert_eq!(pair_supports, expected);
        }
    }

    #[test]
    fn single_qubit_pauli_matrices() {
        let z = pauli_matrix(&PauliString::new(vec![PauliAxis::Z])).unwrap();
        assert_eq!(z[0][0], Complex64::new(1.0, 0.0));
        assert_eq!(z[1][1], Complex64::new(-1.0, 0.0));
        assert_eq!(z[0][1], Complex64::new(0.0, 0.0));

        let y = pauli_matrix(&PauliString::new(vec![PauliAxis::Y])).unwrap();
        assert_eq!(y[0][1], Complex64::new(0.0, -1.0));
        assert_eq!(y[1][0], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn x0_on_two_qubits_squares_to_identity() {
        let s = PauliString::from_ops(2, &[(0, PauliAxis::X)]);
        let m = pauli_matrix(&s).unwrap();
        // X on qubit 0 flips the least-significant bit.
        assert_eq!(m[0][1], Complex64::new(1.0, 0.0));
        assert_eq!(m[2][3], Complex64::new(1.0, 0.0));
        for r in 0..4 {
            for c in 0..4 {
                let sq: Complex64 = (0..4).map(|k| m[r][k] * m[k][c]).sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(sq.re, expected, epsilon = 1e-14);
                assert_abs_diff_eq!(sq.im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn expectation_basis_states() {
        let h = parse_hamiltonian("1.0 Z0 Z1").unwrap();
        let s = Statevector::basis_state(2, 0b00);
        assert_abs_diff_eq!(expectation(&s, &h).unwrap(), 1.0, epsilon = 1e-12);

        let ising = build_model(ModelFamily::Ising, 2, None).unwrap();
        let plus = Statevector::uniform_plus(2);
        assert_abs_diff_eq!(expectation(&plus, &ising).unwrap(), 2.0, epsilon = 1e-12);

        let heis = build_model(ModelFamily::Heisenberg, 2, None).unwrap();
        let s01 = Statevector::basis_state(2, 0b01);
        assert_abs_diff_eq!(expectation(&s01, &heis).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn expectation_dimension_mismatch() {
        let h = build_model(ModelFamily::Ising, 3, None).unwrap();
        let s = Statevector::basis_state(2, 0);
        assert!(expectation(&s, &h).is_err());
    }

    fn dense_expectation(state: &Statevector, h: &Hamiltonian) -> f64 {
        let m = hamiltonian_matrix(h).unwrap();
        let amps = state.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, row) in m.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                acc += amps[r].conj() * v * amps[c];
            }
        }
        acc.re
    }

    proptest! {
        #[test]
        fn expectation_matches_dense_oracle(seed in 0u64..200) {
            let h = build_model(ModelFamily::Ising, 3, None).unwrap();
            let s = Statevector::random(3, seed);
            let fast = expectation(&s, &h).unwrap();
            let dense = dense_expectation(&s, &h);
            prop_assert!((fast - dense).abs() < 1e-10);
        }

        #[test]
        fn expectation_is_linear_in_coefficients(seed in 0u64..100, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            let h1 = build_model(ModelFamily::Ising, 3, None).unwrap();
            let h2 = build_model(ModelFamily::Heisenberg, 3, None).unwrap();
            let mut combined = Vec::new();
            combined.extend(h1.scaled(a).terms().iter().cloned());
            combined.extend(h2.scaled(b).terms().iter().cloned());
            let hc = Hamiltonian::new(3, combined).unwrap();
            let s = Statevector::random(3, seed);
            let lhs = expectation(&s, &hc).unwrap();
            let rhs = a * expectation(&s, &h1).unwrap() + b * expectation(&s, &h2).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
