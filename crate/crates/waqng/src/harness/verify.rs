//! Self-contained invariant checks, runnable from the CLI.
//!
//! Each check exercises one structural identity of the implementation on
//! fixed seeded instances and reports pass/fail with a measured figure of
//! merit. Failures are report entries, not errors.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::circuit::{efficient_su2, grad_parameter_shift, run_shifted};
use crate::metric::{
    dw_distance, gauss_newton_residual_jacobian, hs_tensor, pinv_psd, qfi_pure, weighted_metric,
    MetricTensor, SpectralConfig,
};
use crate::optimizer::init_params;
use crate::pauli::{build_model, expectation, Hamiltonian, ModelFamily, PauliAxis, PauliString};
use crate::shadows::{collect_shadows_of_state, estimate_overlap};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn result(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn check_global_term_identity(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let circuit = efficient_su2(3, 1).unwrap();
        let params = init_params(circuit.n_params(), seed);
        let h = Hamiltonian::new(
            3,
            vec![(
                1.3,
                PauliString::new(vec![PauliAxis::X, PauliAxis::Z, PauliAxis::Y]),
            )],
        )
        .unwrap();
        let w = weighted_metric(&circuit, &params, &h).unwrap();
        let f = qfi_pure(&circuit, &params).unwrap();
        let rel = (w.entries() - f.entries()).norm() / f.entries().norm();
        worst = worst.max(rel);
    }
    result(
        "global-term-w-equals-qfi",
        worst < 1e-9,
        format!("max relative deviation {worst:.3e} (tol 1e-9)"),
    )
}

fn check_purity_relation(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let mut worst = 0.0f64;
    for seed in 0..5u64 {
        let circuit = efficient_su2(3, 1).unwrap();
        let params = init_params(circuit.n_params(), 100 + seed);
        let t = hs_tensor(&circuit, &params, &[0, 1, 2]).unwrap();
        let f = qfi_pure(&circuit, &params).unwrap();
        let dev = ((t.entries() * 2.0) - f.entries()).norm();
        worst = worst.max(dev);
    }
    result(
        "purity-2t-equals-qfi",
        worst < 1e-9,
        format!("max deviation {worst:.3e} (tol 1e-9)"),
    )
}

fn check_gauss_newton(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let mut worst = 0.0f64;
    let cases = [
        (build_model(ModelFamily::Ising, 3, None).unwrap(), 0u64),
        (
            build_model(ModelFamily::WeightedAlpha, 3, Some(0.6)).unwrap(),
            1,
        ),
    ];
    for (h, seed) in cases {
        let circuit = efficient_su2(3, 1).unwrap();
        let params = init_params(circuit.n_params(), 200 + seed);
        let w = weighted_metric(&circuit, &params, &h).unwrap();
        let (_, jac) = gauss_newton_residual_jacobian(&circuit, &params, &h).unwrap();
        let rel = (w.entries() - jac.transpose() * &jac * 2.0).norm() / w.entries().norm();
        worst = worst.max(rel);
    }
    result(
        "gauss-newton-w-equals-2jtj",
        worst < 1e-9,
        format!("max relative deviation {worst:.3e} (tol 1e-9)"),
    )
}

fn check_dw_quadratic(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let circuit = efficient_su2(2, 1).unwrap();
    let h = build_model(ModelFamily::Ising, 2, None).unwrap();
    let params = init_params(circuit.n_params(), 300);
    let w = weighted_metric(&circuit, &params, &h).unwrap();
    let raw = init_params(circuit.n_params(), 301);
    let norm: f64 = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
    let delta: Vec<f64> = raw.iter().map(|x| 1e-3 * x / norm).collect();
    let dw = dw_distance(&circuit, &params, &delta, &h).unwrap();
    let quad = w.quadratic_form(&delta);
    let rel = (dw - quad).abs() / dw.max(1e-30);
    result(
        "dw-quadratic-form",
        rel < 1e-2,
        format!("relative deviation {rel:.3e} (tol 1e-2)"),
    )
}

fn check_gradient_fd(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let circuit = efficient_su2(3, 1).unwrap();
    let h = build_model(ModelFamily::Heisenberg, 3, None).unwrap();
    let params = init_params(circuit.n_params(), 400);
    let grad = grad_parameter_shift(&circuit, &params, &h).unwrap();
    let step = 1e-5;
    let mut worst = 0.0f64;
    for (i, g) in grad.iter().enumerate() {
        let fu = expectation(&run_shifted(&circuit, &params, i, step).unwrap(), &h).unwrap();
        let fd = expectation(&run_shifted(&circuit, &params, i, -step).unwrap(), &h).unwrap();
        worst = worst.max((g - (fu - fd) / (2.0 * step)).abs());
    }
    result(
        "gradient-parameter-shift-vs-fd",
        worst < 1e-6,
        format!("max elementwise deviation {worst:.3e} (tol 1e-6)"),
    )
}

fn check_shadow_overlap(spectral: &SpectralConfig) -> CheckResult {
    let _ = spectral;
    let zero = crate::circuit::Statevector::zero_state(1);
    let a = collect_shadows_of_state(&zero, &[0], 5000, 41).unwrap();
    let b = collect_shadows_of_state(&zero, &[0], 5000, 42).unwrap();
    let p = estimate_overlap(&a, &b).unwrap();
    let dev = (p - 1.0).abs();
    result(
        "shadow-overlap-unbiased",
        dev < 0.15,
        format!("|p̂ - 1| = {dev:.3e} at T = 5000 (tol 0.15)"),
    )
}

fn check_pinv_property(spectral: &SpectralConfig) -> CheckResult {
    let mut worst = 0.0f64;
    for seed in 0..3u64 {
        let v = 5;
        let a = DMatrix::from_fn(v, v, |r, c| {
            let x = ((r * 13 + c * 29 + seed as usize * 7) % 97) as f64 / 97.0;
            x - 0.5
        });
        let m = MetricTensor::from_matrix(&a * a.transpose());
        let p = match pinv_psd(&m, spectral) {
            Ok(p) => p,
            Err(e) => {
                return result("pinv-moore-penrose", false, format!("error: {e}"));
            }
        };
        let err = (m.entries() * &p * m.entries() - m.entries()).norm();
        worst = worst.max(err);
    }
    result(
        "pinv-moore-penrose",
        worst < 1e-8,
        format!("max ‖M M⁺ M - M‖ = {worst:.3e} (tol 1e-8)"),
    )
}

/// Run every registered invariant check, optionally filtered by substring.
pub fn verify_suite(filter: Option<&str>, spectral: &SpectralConfig) -> VerifyReport {
    type Check = (&'static str, fn(&SpectralConfig) -> CheckResult);
    let checks: Vec<Check> = vec![
        ("global-term-w-equals-qfi", check_global_term_identity),
        ("purity-2t-equals-qfi", check_purity_relation),
        ("gauss-newton-w-equals-2jtj", check_gauss_newton),
        ("dw-quadratic-form", check_dw_quadratic),
        ("gradient-parameter-shift-vs-fd", check_gradient_fd),
        ("shadow-overlap-unbiased", check_shadow_overlap),
        ("pinv-moore-penrose", check_pinv_property),
    ];
    let results = checks
        .into_iter()
        .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
        .map(|(_, check)| check(spectral))
        .collect();
    VerifyReport { checks: results }
}
