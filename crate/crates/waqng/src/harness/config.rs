//! Line-based `key = value` experiment configuration.
//!
//! ```text
//! model = ising
//! n = 4
//! layers = 4
//! optimizers = vanilla, qng, waqng
//! lr = 0.02
//! steps = 500
//! seeds = 0, 1, 2
//! rcond = 1e-8
//! ridge = 0
//! out_dir = out/ising4
//! ```
//!
//! `alpha` is required by the `weighted_alpha` model and rejected elsewhere.
//! Lines starting with `#` are comments. All randomness is controlled by the
//! explicit integer seeds.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::metric::SpectralConfig;
use crate::optimizer::{OptimizerKind, StepConfig};
use crate::pauli::{build_model, Hamiltonian, ModelFamily};

use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: ModelFamily,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub layers: usize,
    pub optimizers: Vec<OptimizerKind>,
    pub lr: f64,
    pub steps: usize,
    pub seeds: Vec<u64>,
    pub rcond: f64,
    pub ridge: f64,
    pub out_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self, HarnessError> {
        let mut fields: BTreeMap<String, String> = BTreeMap::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::ConfigParse(format!("line {}: expected `key = value`", line_no + 1))
            })?;
            fields.insert(key.trim().to_string(), value.trim().to_string());
        }

        let take = |key: &str| -> Result<String, HarnessError> {
            fields
                .get(key)
                .cloned()
                .ok_or_else(|| HarnessError::ConfigParse(format!("missing key `{key}`")))
        };
        let parse_err =
            |key: &str, v: &str| HarnessError::ConfigParse(format!("bad value `{v}` for `{key}`"));

        let model: ModelFamily = take("model")?
            .parse()
            .map_err(|_| parse_err("model", &take("model").unwrap()))?;
        let n: usize = take("n")?
            .parse()
            .map_err(|_| parse_err("n", &take("n").unwrap()))?;
        let alpha = match fields.get("alpha") {
            Some(v) => Some(v.parse::<f64>().map_err(|_| parse_err("alpha", v))?),
            None => None,
        };
        let layers: usize = take("layers")?
            .parse()
            .map_err(|_| parse_err("layers", &take("layers").unwrap()))?;
        let optimizers: Vec<OptimizerKind> = take("optimizers")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e: String| HarnessError::ConfigParse(e)))
            .collect::<Result<_, _>>()?;
        let lr: f64 = take("lr")?
            .parse()
            .map_err(|_| parse_err("lr", &take("lr").unwrap()))?;
        let steps: usize = take("steps")?
            .parse()
            .map_err(|_| parse_err("steps", &take("steps").unwrap()))?;
        let seeds: Vec<u64> = take("seeds")?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|_| parse_err("seeds", s)))
            .collect::<Result<_, _>>()?;
        let rcond: f64 = match fields.get("rcond") {
            Some(v) => v.parse().map_err(|_| parse_err("rcond", v))?,
            None => SpectralConfig::default().rcond,
        };
        let ridge: f64 = match fields.get("ridge") {
            Some(v) => v.parse().map_err(|_| parse_err("ridge", v))?,
            None => 0.0,
        };
        let out_dir = PathBuf::from(take("out_dir")?);

        let config = ExperimentConfig {
            model,
            n,
            alpha,
            layers,
            optimizers,
            lr,
            steps,
            seeds,
            rcond,
            ridge,
            out_dir,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.optimizers.is_empty() {
            return Err(HarnessError::ConfigParse("empty optimizer list".into()));
        }
        if self.seeds.is_empty() {
            return Err(HarnessError::ConfigParse("empty seed list".into()));
        }
        if self.steps == 0 {
            return Err(HarnessError::ConfigParse("steps must be positive".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(HarnessError::ConfigParse("lr must be positive".into()));
        }
        // The referenced model must actually be buildable.
        self.hamiltonian()?;
        Ok(())
    }

    pub fn hamiltonian(&self) -> Result<Hamiltonian, HarnessError> {
        Ok(build_model(self.model, self.n, self.alpha)?)
    }

    pub fn step_config(&self) -> StepConfig {
        StepConfig {
            lr: self.lr,
            spectral: SpectralConfig {
                rcond: self.rcond,
                ridge: self.ridge,
            },
        }
    }

    /// Canonical text form, also the hashing input.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("model = {}\n", self.model));
        out.push_str(&format!("n = {}\n", self.n));
        if let Some(alpha) = self.alpha {
            out.push_str(&format!("alpha = {}\n", alpha));
        }
        out.push_str(&format!("layers = {}\n", self.layers));
        let opts: Vec<String> = self.optimizers.iter().map(|o| o.to_string()).collect();
        out.push_str(&format!("optimizers = {}\n", opts.join(", ")));
        out.push_str(&format!("lr = {}\n", self.lr));
        out.push_str(&format!("steps = {}\n", self.steps));
        let seeds: Vec<String> = self.seeds.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("seeds = {}\n", seeds.join(", ")));
        out.push_str(&format!("rcond = {}\n", self.rcond));
        out.push_str(&format!("ridge = {}\n", self.ridge));
        out.push_str(&format!("out_dir = {}\n", self.out_dir.display()));
        out
    }

    /// Content hash recorded in the manifest for provenance.
    pub fn content_hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        format!("{:x}", digest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# demo config
model = ising
n = 4
layers = 2
optimizers = vanilla, qng, waqng
lr = 0.02
steps = 100
seeds = 0, 1, 2
rcond = 1e-8
ridge = 0
out_dir = out/demo
";

    #[test]
    fn parses_sample() {
        let c = ExperimentConfig::from_text(SAMPLE).unwrap();
        assert_eq!(c.model, ModelFamily::Ising);
        assert_eq!(c.optimizers.len(), 3);
        assert_eq!(c.seeds, vec![0, 1, 2]);
        assert_eq!(c.rcond, 1e-8);
    }

    #[test]
    fn text_round_trip() {
        let c = ExperimentConfig::from_text(SAMPLE).unwrap();
        let again = ExperimentConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn json_round_trip() {
        let c = ExperimentConfig::from_text(SAMPLE).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let again: ExperimentConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn rejects_broken_configs() {
        assert!(ExperimentConfig::from_text("model = ising").is_err());
        assert!(ExperimentConfig::from_text(&SAMPLE.replace("vanilla, qng, waqng", "")).is_err());
        assert!(ExperimentConfig::from_text(&SAMPLE.replace("0, 1, 2", "")).is_err());
        assert!(ExperimentConfig::from_text(&SAMPLE.replace("ising", "nonsense")).is_err());
        // weighted_alpha needs n = 3 and an alpha.
        assert!(ExperimentConfig::from_text(&SAMPLE.replace("ising", "weighted_alpha")).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::from_text(SAMPLE).unwrap();
        let b = ExperimentConfig::from_text(&SAMPLE.replace("steps = 100", "steps = 101")).unwrap();
        assert_ne!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash(), a.content_hash());
    }
}
