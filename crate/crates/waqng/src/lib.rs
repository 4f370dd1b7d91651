//! Weight-agnostic natural-gradient VQE laboratory.
//!
//! This crate implements three optimizers for variational quantum
//! eigensolvers on an exact statevector simulator:
//!
//! * vanilla gradient descent, `θ ← θ - η ∇f`,
//! * quantum natural gradient (QNG), `θ ← θ - η F⁺ ∇f`, preconditioned by
//!   the pure-state quantum Fisher information matrix `F`,
//! * weighted-average QNG (WA-QNG), `θ ← θ - η W⁺ ∇f`, preconditioned by a
//!   coefficient-weighted sum of subsystem Hilbert-Schmidt metric tensors,
//!   `W = (2/Σ h_m²) Σ h_m² T_m`, one tensor per Hamiltonian term support.
//!
//! `W` only touches the reduced states of each term's support, so it can be
//! estimated from randomized local measurements; the [`shadows`] module
//! provides the classical-shadow estimators for `tr(ρσ)` and for individual
//! metric-tensor elements, with a Chebyshev shot budget.
//!
//! # Quick start
//!
//! Build a model Hamiltonian, an ansatz, and run a short optimization:
//!
//! ```
//! use waqng::circuit::efficient_su2;
//! use waqng::optimizer::{ground_energy_exact, run_vqe, OptimizerKind, StepConfig};
//! use waqng::pauli::{build_model, ModelFamily};
//!
//! let h = build_model(ModelFamily::Ising, 2, None)?;
//! let circuit = efficient_su2(2, 1)?;
//! let record = run_vqe(&circuit, &h, OptimizerKind::Waqng, &StepConfig::default(), 100, 0)?;
//! let (ground, _) = ground_energy_exact(&h)?;
//! assert!(record.energies.last().unwrap() - ground < 0.5);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! # Structural identities
//!
//! The implementation maintains three exact relations, each checked by the
//! built-in verification suite ([`harness::verify_suite`]):
//!
//! * a single Pauli term acting on every qubit makes `W` coincide with `F`,
//! * at exact purity the full-support Hilbert-Schmidt tensor obeys `2T = F`,
//! * `W = 2JᵀJ` for the Jacobian of the least-squares residual of the
//!   energy objective (a Gauss-Newton reading of WA-QNG).
//!
//! ```
//! use waqng::circuit::efficient_su2;
//! use waqng::metric::{qfi_pure, weighted_metric};
//! use waqng::optimizer::init_params;
//! use waqng::pauli::parse_hamiltonian;
//!
//! let circuit = efficient_su2(2, 1)?;
//! let params = init_params(circuit.n_params(), 7);
//! // One global term: WA-QNG's metric equals the Fisher matrix.
//! let h = parse_hamiltonian("qubits 2; 1.5 X0 Z1")?;
//! let w = weighted_metric(&circuit, &params, &h)?;
//! let f = qfi_pure(&circuit, &params)?;
//! assert!((w.entries() - f.entries()).norm() < 1e-9 * f.entries().norm());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! # Modules
//!
//! * [`pauli`] — Pauli strings, Hamiltonians, the text format, model builders
//! * [`circuit`] — gates, statevector simulation, parameter-shift gradients
//! * [`metric`] — reduced densities, `F`, `T`, `W`, pseudo-inverse, distances
//! * [`shadows`] — randomized-measurement estimators and shot budgets
//! * [`optimizer`] — the three update rules and the VQE loop
//! * [`harness`] — experiment configs, multi-seed runs, gap/AUC analysis,
//!   verification suite
//!
//! The `waqng` binary exposes all of this as CLI subcommands; see the book
//! under `book/` for worked chapters built around the same examples.

pub mod circuit;
pub mod harness;
pub mod metric;
pub mod optimizer;
pub mod pauli;
pub mod shadows;

/// The guide's chapters compile as doc-tests so `book/` cannot drift from
/// the crate; `cargo test --doc` executes every snippet.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pauli-hamiltonians.md")]
    mod pauli_hamiltonians {}
    #[doc = include_str!("../../../book/src/circuits-and-gradients.md")]
    mod circuits_and_gradients {}
    #[doc = include_str!("../../../book/src/metric-tensors.md")]
    mod metric_tensors {}
    #[doc = include_str!("../../../book/src/classical-shadows.md")]
    mod classical_shadows {}
    #[doc = include_str!("../../../book/src/optimizers.md")]
    mod optimizers {}
    #[doc = include_str!("../../../book/src/experiments-cli.md")]
    mod experiments_cli {}
}
