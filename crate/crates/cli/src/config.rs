use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spikeconn::estimators::{EstimatorSpec, Method};
use spikeconn::inference::ThresholdPolicy;
use spikeconn::simulator::SimulationConfig;
use spikeconn::topology::{TopologySpec, WeightParams};

use crate::error::{io_error, CliError, CliResult};

/// Burst-rate window the weight scale is calibrated into before simulating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationStage {
    pub min_bursts_per_minute: f64,
    pub max_bursts_per_minute: f64,
    #[serde(default = "default_probe_ms")]
    pub probe_ms: u32,
}

fn default_probe_ms() -> u32 {
    60_000
}

/// Existing recordings used instead of generating and simulating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputFiles {
    pub spikes: PathBuf,
    /// Ground truth for evaluation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<PathBuf>,
    /// `recording.json` mapping spike channels to network neurons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recording: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdStage {
    #[serde(flatten)]
    pub policy: ThresholdPolicy,
    /// Matrix to threshold; the first estimator when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluationOptions {
    pub target_fpr: f64,
    /// Graph metrics of the thresholded network.
    pub graph: bool,
    pub reference_realizations: usize,
}

impl Default for EvaluationOptions {
    fn default() -> Self {
        Self {
            target_fpr: 0.01,
            graph: true,
            reference_realizations: 10,
        }
    }
}

/// Every stage of a run. Stages without a section are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; every stage seed is derived from it.
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<TopologySpec>,
    #[serde(default)]
    pub weights: WeightParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputFiles>,
    #[serde(default = "default_bin_size")]
    pub bin_size: u32,
    #[serde(default)]
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<ThresholdStage>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<EvaluationOptions>,
    /// Output directory when `--out` is not given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

fn default_bin_size() -> u32 {
    1
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Check every field and that referenced input files exist.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |field: &str, constraint: &str| Err(CliError::Config(format!("{field}: {constraint}")));
        match (&self.input, &self.topology, &self.simulation) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => return bad("input", "cannot be combined with topology or simulation"),
            (None, None, _) => return bad("topology", "required unless input.spikes is given"),
            (None, Some(_), None) if !self.estimators.is_empty() => return bad("simulation", "required to estimate from a generated network"),
            _ => {}
        }
        if let Some(t) = &self.topology {
            t.validate().map_err(|e| CliError::in_field("topology", e))?;
        }
        if let (Some(s), Some(t)) = (&self.simulation, &self.topology) {
            s.validate(t.n).map_err(|e| CliError::in_field("simulation", e))?;
        }
        if !(self.weights.scale > 0.0 && self.weights.scale.is_finite()) {
            return bad("weights.scale", "must be positive and finite");
        }
        if let Some(c) = &self.calibration {
            if !(c.min_bursts_per_minute >= 0.0 && c.min_bursts_per_minute <= c.max_bursts_per_minute && c.max_bursts_per_minute > 0.0) {
                return bad("calibration", "need 0 <= min_bursts_per_minute <= max_bursts_per_minute, max > 0");
            }
            if self.simulation.is_none() {
                return bad("calibration", "needs a simulation section");
            }
        }
        if let Some(input) = &self.input {
            for path in std::iter::once(&input.spikes).chain(&input.network).chain(&input.recording) {
                if !path.is_file() {
                    return Err(io_error(path, std::io::Error::new(std::io::ErrorKind::NotFound, "input file not found")));
                }
            }
            if input.network.is_some() != input.recording.is_some() {
                return bad("input", "network and recording must be given together");
            }
        }
        if self.bin_size == 0 {
            return bad("bin_size", "must be at least 1");
        }
        for (i, spec) in self.estimators.iter().enumerate() {
            spec.validate().map_err(|e| CliError::in_field(&format!("estimators[{i}]"), e))?;
        }
        if let Some(t) = &self.threshold {
            t.policy.validate().map_err(|e| CliError::in_field("threshold", e))?;
            let method = t.method.or(self.estimators.first().map(|s| s.method));
            match method {
                None => return bad("threshold", "needs an estimator"),
                Some(m) if !self.estimators.iter().any(|s| s.method == m) => return bad("threshold.method", "must be one of the estimators"),
                Some(m) if t.policy.signed && !m.is_signed() => return bad("threshold.signed", "requires a signed method such as TSPE"),
                _ => {}
            }
        }
        if let Some(e) = &self.evaluation {
            if !(0.0..=1.0).contains(&e.target_fpr) {
                return bad("evaluation.target_fpr", "must lie in [0, 1]");
            }
            if e.reference_realizations == 0 {
                return bad("evaluation.reference_realizations", "must be at least 1");
            }
        }
        Ok(())
    }

    pub fn threshold_method(&self) -> Option<Method> {
        let t = self.threshold.as_ref()?;
        t.method.or(self.estimators.first().map(|s| s.method))
    }
}
