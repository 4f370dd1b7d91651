//! Normalized gap curves and discrete AUC between two optimizers.
//!
//! The gap at step `t` is the difference of the two mean learning curves,
//! divided by a normalization constant taken from the baseline curve's
//! initial-minus-final value:
//!
//! ```text
//! gap_t = (mean_a(t) - mean_b(t)) / (mean_b(0) - mean_b(S))
//! auc   = Σ_t gap_t
//! ```
//!
//! Calling with `a` the slower method and `b` the faster baseline (e.g.
//! a = QNG, b = WA-QNG) yields positive gaps. [`Normalization::PerMethod`]
//! instead normalizes each mean curve by its own initial-minus-final value
//! before differencing.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide the raw difference by the baseline (`b`) initial-minus-final.
    BaselineB,
    /// Normalize each mean curve by its own initial-minus-final first.
    PerMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapAnalysis {
    /// One entry per recorded step (length steps + 1).
    pub gap: Vec<f64>,
    /// Discrete sum of the gap entries.
    pub auc: f64,
    /// The constant that divided the raw differences (baseline mode), or the
    /// pair used in per-method mode.
    pub normalization: f64,
    pub mode: Normalization,
}

/// Arithmetic mean over seeds at each step.
pub fn mean_curve(curves: &[Vec<f64>]) -> Vec<f64> {
    let steps = curves[0].len();
    let n = curves.len() as f64;
    (0..steps)
        .map(|t| curves.iter().map(|c| c[t]).sum::<f64>() / n)
        .collect()
}

/// Compare two per-seed curve sets.
pub fn gap_analysis(
    curves_a: &[Vec<f64>],
    curves_b: &[Vec<f64>],
    mode: Normalization,
) -> Result<GapAnalysis, HarnessError> {
    if curves_a.is_empty()
        || curves_b.is_empty()
        || curves_a.len() != curves_b.len()
        || curves_a
            .iter()
            .chain(curves_b.iter())
            .any(|c| c.len() != curves_a[0].len())
    {
        return Err(HarnessError::CurveShapeMismatch);
    }
    let mean_a = mean_curve(curves_a);
    let mean_b = mean_curve(curves_b);
    let last = mean_b.len() - 1;

    let (gap, normalization) = match mode {
        Normalization::BaselineB => {
            let norm = mean_b[0] - mean_b[last];
            if norm.abs() < 1e-15 {
                return Err(HarnessError::ZeroNormalization);
            }
            let gap: Vec<f64> = mean_a
                .iter()
                .zip(&mean_b)
                .map(|(a, b)| (a - b) / norm)
                .collect();
            (gap, norm)
        }
        Normalization::PerMethod => {
            let norm_a = mean_a[0] - mean_a[last];
            let norm_b = mean_b[0] - mean_b[last];
            if norm_a.abs() < 1e-15 || norm_b.abs() < 1e-15 {
                return Err(HarnessError::ZeroNormalization);
            }
            let gap: Vec<f64> = mean_a
                .iter()
                .zip(&mean_b)
                .map(|(a, b)| a / norm_a - b / norm_b)
                .collect();
            (gap, norm_b)
        }
    };
    let auc = gap.iter().sum();
    Ok(GapAnalysis {
        gap,
        auc,
        normalization,
        mode,
    })
}

/// Read one `step,energy` run CSV into an energy list.
pub fn read_energy_csv(path: &Path) -> Result<Vec<f64>, HarnessError> {
    let raw = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut energies = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if i == 0 {
            continue; // header
        }
        let energy = line
            .split(',')
            .nth(1)
            .and_then(|v| v.parse::<f64>().ok())
            .ok_or_else(|| HarnessError::MalformedCsv {
                path: path.to_path_buf(),
                detail: format!("line {}", i + 1),
            })?;
        energies.push(energy);
    }
    if energies.is_empty() {
        return Err(HarnessError::MalformedCsv {
            path: path.to_path_buf(),
            detail: "no data rows".into(),
        });
    }
    Ok(energies)
}

/// Read every `*.csv` run file in a directory, sorted by filename.
pub fn read_run_dir(dir: &Path) -> Result<Vec<Vec<f64>>, HarnessError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_energy_csv(p)).collect()
}

pub fn write_gap_csv(path: &Path, analysis: &GapAnalysis) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
        }
    }
    let mut out = String::from("step,gap\n");
    for (t, g) in analysis.gap.iter().enumerate() {
        out.push_str(&format!("{},{}\n", t, g));
    }
    fs::write(path, out).map_err(|e| HarnessError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_curves_give_zero_gap() {
        let curves = vec![vec![3.0, 2.0, 1.0], vec![3.2, 2.1, 0.9]];
        let g = gap_analysis(&curves, &curves, Normalization::BaselineB).unwrap();
        assert!(g.gap.iter().all(|x| x.abs() < 1e-15));
        assert!(g.auc.abs() < 1e-15);
    }

    #[test]
    fn constant_offset_auc_arithmetic() {
        // a sits c·N above b at every step: auc = c·(S+1).
        let b = vec![vec![4.0, 2.0, 1.0, 0.0]];
        let n = 4.0; // b[0] - b[last]
        let c = 0.5;
        let a = vec![b[0].iter().map(|x| x + c * n).collect::<Vec<f64>>()];
        let g = gap_analysis(&a, &b, Normalization::BaselineB).unwrap();
        assert!((g.auc - c * 4.0).abs() < 1e-12);
    }

    #[test]
    fn swapping_negates_unnormalized_gap() {
        let a = vec![vec![5.0, 3.0, 2.0]];
        let b = vec![vec![4.0, 2.5, 1.0]];
        let ab = gap_analysis(&a, &b, Normalization::BaselineB).unwrap();
        let ba = gap_analysis(&b, &a, Normalization::BaselineB).unwrap();
        for (x, y) in ab.gap.iter().zip(ba.gap.iter()) {
            let raw_x = x * ab.normalization;
            let raw_y = y * ba.normalization;
            assert!((raw_x + raw_y).abs() < 1e-12);
        }
    }

    #[test]
    fn flat_baseline_is_error() {
        let a = vec![vec![1.0, 1.0, 1.0]];
        let b = vec![vec![2.0, 2.0, 2.0]];
        assert!(matches!(
            gap_analysis(&a, &b, Normalization::BaselineB).unwrap_err(),
            HarnessError::ZeroNormalization
        ));
    }

    #[test]
    fn shape_mismatch_is_error() {
        let a = vec![vec![1.0, 2.0]];
        let b = vec![vec![1.0, 2.0], vec![1.0, 2.0]];
        assert!(matches!(
            gap_analysis(&a, &b, Normalization::BaselineB).unwrap_err(),
            HarnessError::CurveShapeMismatch
        ));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.csv");
        fs::write(&path, "step,energy\n0,3.5\n1,-1.25\n").unwrap();
        assert_eq!(read_energy_csv(&path).unwrap(), vec![3.5, -1.25]);
        assert_eq!(read_run_dir(dir.path()).unwrap(), vec![vec![3.5, -1.25]]);
    }
}
