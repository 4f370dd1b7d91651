//! Multi-seed experiment execution and persistence.
//!
//! Output layout under the configured directory:
//!
//! ```text
//! runs/<optimizer>/seed_<seed>.csv   step,energy
//! summary/<optimizer>.csv            step,mean,std
//! manifest.json                      config + provenance
//! ```
//!
//! The same seed list is reused for every optimizer so initializations match
//! across methods. Runs execute in parallel; files are written afterwards in
//! a fixed order, so outputs are byte-identical regardless of scheduling.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::efficient_su2;
use crate::optimizer::{
    ground_energy_exact, run_vqe, OptimizerKind, RunRecord, MAX_EIGENSOLVE_QUBITS,
};

use super::{ExperimentConfig, HarnessError};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub code_version: String,
    pub rcond: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_energy: Option<f64>,
}

/// What an experiment produced, with curves kept in memory for analysis.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub manifest: Manifest,
    /// Per optimizer, in config order: per-seed energy curves in seed order.
    pub curves: Vec<(OptimizerKind, Vec<Vec<f64>>)>,
    pub files: Vec<PathBuf>,
}

fn write_file(path: &Path, contents: &str) -> Result<(), HarnessError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

fn run_csv(record: &RunRecord) -> String {
    let mut out = String::from("step,energy\n");
    for (step, energy) in record.energies.iter().enumerate() {
        out.push_str(&format!("{},{}\n", step, energy));
    }
    out
}

fn summary_csv(curves: &[Vec<f64>]) -> String {
    let steps = curves[0].len();
    let n = curves.len() as f64;
    let mut out = String::from("step,mean,std\n");
    for t in 0..steps {
        let mean = curves.iter().map(|c| c[t]).sum::<f64>() / n;
        let var = curves.iter().map(|c| (c[t] - mean).powi(2)).sum::<f64>() / n;
        out.push_str(&format!("{},{},{}\n", t, mean, var.sqrt()));
    }
    out
}

/// Run every (optimizer, seed) pair and persist run CSVs, per-optimizer
/// summaries, and the manifest.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput, HarnessError> {
    config.validate()?;
    let h = config.hamiltonian()?;
    let circuit = efficient_su2(config.n, config.layers)?;
    let step_cfg = config.step_config();

    let jobs: Vec<(OptimizerKind, u64)> = config
        .optimizers
        .iter()
        .flat_map(|&opt| config.seeds.iter().map(move |&seed| (opt, seed)))
        .collect();
    let records: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(opt, seed)| run_vqe(&circuit, &h, opt, &step_cfg, config.steps, seed))
        .collect::<Result<_, _>>()?;

    let ground_energy = if config.n <= MAX_EIGENSOLVE_QUBITS {
        Some(ground_energy_exact(&h)?.0)
    } else {
        None
    };
    let manifest = Manifest {
        config: config.clone(),
        config_hash: config.content_hash(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        rcond: config.rcond,
        ground_energy,
    };

    let mut files = Vec::new();
    let mut curves = Vec::new();
    for (o, &opt) in config.optimizers.iter().enumerate() {
        let mut per_seed = Vec::new();
        for (s, &seed) in config.seeds.iter().enumerate() {
            let record = &records[o * config.seeds.len() + s];
            let path = config
                .out_dir
                .join("runs")
                .join(opt.to_string())
                .join(format!("seed_{}.csv", seed));
            write_file(&path, &run_csv(record))?;
            files.push(path);
            per_seed.push(record.energies.clone());
        }
        let summary_path = config.out_dir.join("summary").join(format!("{}.csv", opt));
        write_file(&summary_path, &summary_csv(&per_seed))?;
        files.push(summary_path);
        curves.push((opt, per_seed));
    }
    let manifest_path = config.out_dir.join("manifest.json");
    write_file(&manifest_path, &serde_json::to_string_pretty(&manifest)?)?;
    files.push(manifest_path);

    Ok(ExperimentOutput {
        manifest,
        curves,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::ModelFamily;

    fn small_config(dir: &Path) -> ExperimentConfig {
        ExperimentConfig {
            model: ModelFamily::Ising,
            n: 2,
            alpha: None,
            layers: 1,
            optimizers: vec![OptimizerKind::Vanilla, OptimizerKind::Waqng],
            lr: 0.05,
            steps: 5,
            seeds: vec![1, 2],
            rcond: 1e-8,
            ridge: 0.0,
            out_dir: dir.to_path_buf(),
        }
    }

    #[test]
    fn file_count_contract() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&small_config(dir.path())).unwrap();
        // 2 seeds x 2 optimizers -> 4 run files + 2 summaries + 1 manifest.
        assert_eq!(out.files.len(), 7);
        for f in &out.files {
            assert!(f.exists(), "missing {:?}", f);
        }
    }

    #[test]
    fn summary_mean_matches_definition() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        let out = run_experiment(&config).unwrap();
        let (_, per_seed) = &out.curves[0];
        let summary = fs::read_to_string(dir.path().join("summary").join("vanilla.csv")).unwrap();
        for (t, line) in summary.lines().skip(1).enumerate() {
            let mean: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
            let expect = per_seed.iter().map(|c| c[t]).sum::<f64>() / per_seed.len() as f64;
            assert!((mean - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn manifest_round_trips_config() {
        let dir = tempfile::tempdir().unwrap();
        let config = small_config(dir.path());
        run_experiment(&config).unwrap();
        let raw = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
        let manifest: Manifest = serde_json::from_str(&raw).unwrap();
        assert_eq!(manifest.config, config);
        assert_eq!(manifest.config_hash, config.content_hash());
        assert!(manifest.ground_energy.is_some());
    }

    #[test]
    fn step_zero_energies_align_across_optimizers() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_experiment(&small_config(dir.path())).unwrap();
        let (_, a) = &out.curves[0];
        let (_, b) = &out.curves[1];
        for (ca, cb) in a.iter().zip(b.iter()) {
            assert_eq!(ca[0], cb[0]);
        }
    }
}
