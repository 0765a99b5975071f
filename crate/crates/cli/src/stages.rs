//! Building blocks shared by the subcommands and the pipeline.

use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use spikeconn::analysis::{evaluate_method, small_world_ness, EvaluationReport, Graph, GraphMetrics};
use spikeconn::estimators::{ConnectivityMatrix, Method};
use spikeconn::inference::ThresholdedConnectivityMatrix;
use spikeconn::rng::{derive_seed, rng_from_seed, stream};
use spikeconn::simulator::{calibrate_weight_scale, select_recording_subset, simulate, CalibrationSettings, CalibrationTarget, SimulationConfig};
use spikeconn::spikedata::SpikeTrainSet;
use spikeconn::topology::{assign_weights_and_delays, generate_topology, GroundTruthNetwork, TopologyMeta, TopologySpec, WeightParams};

use crate::config::CalibrationStage;
use crate::error::{io_error, CliResult};

/// Channels of a recording as 0-based network neuron indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Recording {
    pub channels: Vec<usize>,
}

impl Recording {
    pub fn write(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| io_error(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

/// `cm_<method>`, lower case.
pub fn cm_stem(method: Method) -> String {
    format!("cm_{}", method.name().to_lowercase())
}

/// Split `dir/stem.csv` (or `dir/stem`) into directory and stem.
pub fn split_stem(path: &Path) -> (PathBuf, String) {
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".csv").unwrap_or(&name).to_string();
    (if dir.as_os_str().is_empty() { PathBuf::from(".") } else { dir }, stem)
}

pub fn read_cm(path: &Path) -> CliResult<ConnectivityMatrix<f64>> {
    let (dir, stem) = split_stem(path);
    Ok(ConnectivityMatrix::read(&dir, &stem)?)
}

pub fn read_tcm(path: &Path) -> CliResult<ThresholdedConnectivityMatrix> {
    let (dir, stem) = split_stem(path);
    Ok(ThresholdedConnectivityMatrix::read(&dir, &stem)?)
}

/// Topology from `seed/"topology"`, weights from `seed/"weights"`, optionally
/// calibrated to a burst-rate window.
pub fn build_network(
    topology: &TopologySpec,
    weights: &WeightParams,
    calibration: Option<(&CalibrationStage, &SimulationConfig)>,
    seed: u64,
) -> CliResult<GroundTruthNetwork> {
    let mask = generate_topology(topology, &mut stream(seed, "topology", 0))?;
    let meta = TopologyMeta {
        family: topology.family.name().to_string(),
        params: serde_json::to_value(topology)?,
        seed,
    };
    let weight_seed = derive_seed(seed, "weights", 0);
    match calibration {
        None => Ok(assign_weights_and_delays(&mask, weights, meta, &mut rng_from_seed(weight_seed))?),
        Some((stage, simulation)) => {
            let mut probe = simulation.clone();
            probe.seed = derive_seed(seed, "calibration", 0);
            let target = CalibrationTarget::new(stage.min_bursts_per_minute, stage.max_bursts_per_minute);
            let settings = CalibrationSettings {
                probe_ms: stage.probe_ms,
                ..CalibrationSettings::default()
            };
            let c = calibrate_weight_scale(&mask, weights, &meta, weight_seed, &probe, &target, &settings)?;
            log::info!("calibrated weight scale {:.3}: {:.0} bursts/min after {} probes", c.scale, c.bursts_per_minute, c.iterations);
            Ok(c.network)
        }
    }
}

/// Simulate with the seed from `seed/"simulation"` and keep the recorded
/// subset drawn from `seed/"subset"`.
pub fn record(network: &GroundTruthNetwork, simulation: &SimulationConfig, seed: u64) -> CliResult<(SpikeTrainSet, Recording)> {
    let mut config = simulation.clone();
    config.seed = derive_seed(seed, "simulation", 0);
    let all = simulate(network, &config)?;
    let channels = select_recording_subset(network, config.subset_size, &mut stream(seed, "subset", 0))?;
    log::info!("simulated {} spikes, recording {} channels", all.total_spikes(), channels.len());
    Ok((all.select(&channels)?, Recording { channels }))
}

/// Graph metrics of a thresholded network with references drawn from `seed/"graph"`.
pub fn graph_metrics(tcm: &ThresholdedConnectivityMatrix, seed: u64, realizations: usize) -> CliResult<Option<GraphMetrics>> {
    let graph = Graph::from_classes(&tcm.classes);
    if graph.edge_count() == 0 {
        log::info!("thresholded network has no edges, graph metrics skipped");
        return Ok(None);
    }
    Ok(Some(small_world_ness(&graph, &mut stream(seed, "graph", 0), realizations)?))
}

/// Out-degree histogram `(degree, count)` of a ternary matrix.
pub fn degree_histogram(classes: &Array2<i8>) -> Vec<(usize, usize)> {
    let degrees: Vec<usize> = classes.rows().into_iter().map(|r| r.iter().filter(|&&c| c != 0).count()).collect();
    let max = degrees.iter().copied().max().unwrap_or(0);
    (0..=max).map(|d| (d, degrees.iter().filter(|&&x| x == d).count())).collect()
}

/// ROC evaluation of every matrix against the network restricted to the recording.
pub fn evaluate(
    cms: &[ConnectivityMatrix<f64>],
    truth: &GroundTruthNetwork,
    recording: &Recording,
    target_fpr: f64,
) -> CliResult<EvaluationReport> {
    let labels = truth.sign_matrix(&recording.channels);
    let mut report = EvaluationReport::default();
    for cm in cms {
        let e = evaluate_method(cm, &labels, target_fpr)?;
        log::info!("{}: AUC {:.3}, TPR {:.3} at FPR {target_fpr}", cm.method, e.auc, e.tpr_at_target);
        report.methods.push(e);
    }
    Ok(report)
}
