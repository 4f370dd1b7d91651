use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use waqng::circuit::{efficient_su2, Statevector};
use waqng::harness::{
    gap_analysis, read_run_dir, run_experiment, verify_suite, write_gap_csv, ExperimentConfig,
    Normalization,
};
use waqng::metric::{hs_tensor, SpectralConfig};
use waqng::optimizer::{ground_energy_exact, init_params};
use waqng::pauli::{build_model, ModelFamily};
use waqng::shadows::{
    collect_shadows_of_state, estimate_metric_element, estimate_overlap, shots_budget,
};

#[derive(Parser)]
#[command(
    name = "waqng",
    version,
    about = "Weight-agnostic natural-gradient VQE laboratory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a multi-seed experiment from a config file.
    Run {
        /// Line-based `key = value` config file.
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact ground energy of a model Hamiltonian.
    Ground {
        #[arg(long)]
        model: ModelFamily,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alpha: Option<f64>,
    },
    /// Gap curve and discrete AUC between two run directories.
    Gap {
        /// Directory of per-seed `step,energy` CSVs for method a.
        #[arg(long)]
        a: PathBuf,
        /// Directory of per-seed CSVs for the baseline method b.
        #[arg(long)]
        b: PathBuf,
        /// Output CSV path (`step,gap`).
        #[arg(long)]
        out: PathBuf,
        /// Normalize each curve by its own initial-minus-final value.
        #[arg(long)]
        self_normalize: bool,
    },
    /// Run the invariant verification suite.
    Verify {
        /// Only run checks whose name contains this substring.
        #[arg(long)]
        filter: Option<String>,
        /// Pseudo-inverse eigenvalue cutoff relative to the largest.
        #[arg(long, default_value_t = SpectralConfig::default().rcond)]
        rcond: f64,
    },
    /// Classical-shadow estimator demos.
    Shadows(ShadowsArgs),
}

#[derive(Args)]
struct ShadowsArgs {
    #[command(subcommand)]
    command: ShadowsCommand,
}

#[derive(Subcommand)]
enum ShadowsCommand {
    /// Estimate tr(ρσ) for |0..0⟩ vs |+..+⟩ (exact value: 2^-n).
    Overlap {
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Snapshots per shadow set.
        #[arg(long, default_value_t = 10000)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Estimate one weighted-metric tensor element from shadows.
    MetricElement {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        layers: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
        /// Snapshots per shadow set (eight sets are drawn).
        #[arg(long, default_value_t = 10000)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Chebyshev shot budget for a k-local overlap at accuracy eps, confidence 1-delta.
    Budget {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
    },
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Run { config, out } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let mut config = ExperimentConfig::from_text(&text).map_err(|e| e.to_string())?;
            if let Some(out) = out {
                config.out_dir = out;
            }
            let output = run_experiment(&config).map_err(|e| e.to_string())?;
            if let Some(ground) = output.manifest.ground_energy {
                println!("ground energy: {ground}");
            }
            for file in &output.files {
                println!("wrote {}", file.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ground { model, n, alpha } => {
            let h = build_model(model, n, alpha).map_err(|e| e.to_string())?;
            let (energy, _) = ground_energy_exact(&h).map_err(|e| e.to_string())?;
            println!("{energy}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Gap {
            a,
            b,
            out,
            self_normalize,
        } => {
            let curves_a = read_run_dir(&a).map_err(|e| e.to_string())?;
            let curves_b = read_run_dir(&b).map_err(|e| e.to_string())?;
            let mode = if self_normalize {
                Normalization::PerMethod
            } else {
                Normalization::BaselineB
            };
            let analysis = gap_analysis(&curves_a, &curves_b, mode).map_err(|e| e.to_string())?;
            write_gap_csv(&out, &analysis).map_err(|e| e.to_string())?;
            println!("auc: {}", analysis.auc);
            println!("wrote {}", out.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { filter, rcond } => {
            let spectral = SpectralConfig {
                rcond,
                ..SpectralConfig::default()
            };
            let report = verify_suite(filter.as_deref(), &spectral);
            if report.checks.is_empty() {
                return Err("no check matches the filter".into());
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?
            );
            Ok(if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::Shadows(args) => shadows_command(args.command),
    }
}

fn shadows_command(command: ShadowsCommand) -> Result<ExitCode, String> {
    match command {
        ShadowsCommand::Overlap { n, t, seed } => {
            let support: Vec<usize> = (0..n).collect();
            let zero = Statevector::zero_state(n);
            let plus = Statevector::uniform_plus(n);
            let a =
                collect_shadows_of_state(&zero, &support, t, seed).map_err(|e| e.to_string())?;
            let b = collect_shadows_of_state(&plus, &support, t, seed.wrapping_add(1))
                .map_err(|e| e.to_string())?;
            let estimate = estimate_overlap(&a, &b).map_err(|e| e.to_string())?;
            println!("estimate: {estimate}");
            println!("exact: {}", 0.5f64.powi(n as i32));
            Ok(ExitCode::SUCCESS)
        }
        ShadowsCommand::MetricElement {
            n,
            layers,
            i,
            j,
            t,
            seed,
        } => {
            let circuit = efficient_su2(n, layers).map_err(|e| e.to_string())?;
            let params = init_params(circuit.n_params(), seed);
            let support: Vec<usize> = (0..n).collect();
            let estimate = estimate_metric_element(&circuit, &params, i, j, &support, t, seed)
                .map_err(|e| e.to_string())?;
            let exact = hs_tensor(&circuit, &params, &support).map_err(|e| e.to_string())?;
            println!("estimate: {estimate}");
            println!("exact: {}", 2.0 * exact.entries()[(i, j)]);
            Ok(ExitCode::SUCCESS)
        }
        ShadowsCommand::Budget { k, eps, delta } => {
            let shots = shots_budget(k, eps, delta).map_err(|e| e.to_string())?;
            println!("{shots}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
