use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use spikeconn::analysis::emit_plots;
use spikeconn::estimators::{estimate_cms, ConnectivityMatrix};
use spikeconn::inference::infer_connections;
use spikeconn::rng::derive_seed;
use spikeconn::spikedata::{read_sdf_json, write_sdf_json, BinaryRaster};
use spikeconn::topology::GroundTruthNetwork;

use crate::config::PipelineConfig;
use crate::error::{io_error, CliResult};
use crate::manifest::{RunManifest, StageTiming};
use crate::stages::{build_network, cm_stem, degree_histogram, ensure_dir, evaluate, graph_metrics, record, Recording};

/// Stage-seed labels recorded in the manifest.
const SEED_LABELS: [&str; 6] = ["topology", "weights", "calibration", "simulation", "subset", "surrogate"];

struct Timer {
    stages: Vec<StageTiming>,
}

impl Timer {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> CliResult<T>) -> CliResult<T> {
        let start = Instant::now();
        log::info!("stage {stage}");
        let out = f()?;
        self.stages.push(StageTiming {
            stage: stage.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        Ok(out)
    }
}

/// Run every configured stage into `out`. Files are written into a staging
/// directory first and moved into `out` only when all stages succeed.
pub fn run_pipeline(config: &PipelineConfig, out: &Path) -> CliResult<RunManifest> {
    config.validate()?;
    ensure_dir(out)?;
    let staging = out.join(format!(".staging-{}", std::process::id()));
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(|e| io_error(&staging, e))?;
    }
    ensure_dir(&staging)?;
    let result = run_stages(config, &staging);
    let outcome = result.and_then(|mut manifest| {
        manifest.record_files(&staging)?;
        for name in manifest.files.keys() {
            let (from, to) = (staging.join(name), out.join(name));
            std::fs::rename(&from, &to).map_err(|e| io_error(&to, e))?;
        }
        manifest.write(&out.join("manifest.json"))?;
        Ok(manifest)
    });
    let _ = std::fs::remove_dir_all(&staging);
    outcome
}

fn run_stages(config: &PipelineConfig, dir: &Path) -> CliResult<RunManifest> {
    let seed = config.seed;
    let seeds: BTreeMap<String, u64> = SEED_LABELS.iter().map(|l| (l.to_string(), derive_seed(seed, l, 0))).collect();
    let mut manifest = RunManifest::new(serde_json::to_value(config)?, seeds);
    let mut timer = Timer { stages: Vec::new() };

    let mut truth: Option<(GroundTruthNetwork, Recording)> = None;
    let spikes = match (&config.input, &config.topology) {
        (Some(input), _) => {
            let set = timer.run("load", || Ok(read_sdf_json(&input.spikes)?))?;
            if let (Some(n), Some(r)) = (&input.network, &input.recording) {
                truth = Some((GroundTruthNetwork::read_json(n)?, Recording::read(r)?));
            }
            Some(set)
        }
        (None, Some(topology)) => {
            let calibration = config.calibration.as_ref().zip(config.simulation.as_ref());
            let network = timer.run("generate", || build_network(topology, &config.weights, calibration, seed))?;
            network.write_json(&dir.join("network.json"))?;
            match &config.simulation {
                Some(simulation) => {
                    let (set, recording) = timer.run("simulate", || record(&network, simulation, seed))?;
                    write_sdf_json(&set, &dir.join("spikes.sdf.json"))?;
                    recording.write(&dir.join("recording.json"))?;
                    truth = Some((network, recording));
                    Some(set)
                }
                None => None,
            }
        }
        (None, None) => None,
    };

    let Some(spikes) = spikes else {
        manifest.stages = timer.stages;
        return Ok(manifest);
    };

    let cms: Vec<ConnectivityMatrix<f64>> = if config.estimators.is_empty() {
        Vec::new()
    } else {
        timer.run("estimate", || {
            let raster = BinaryRaster::from_set(&spikes, config.bin_size)?;
            let cms = estimate_cms::<f64>(&raster, &config.estimators)?;
            for cm in &cms {
                cm.write(dir, &cm_stem(cm.method))?;
            }
            Ok(cms)
        })?
    };

    let tcm = match (&config.threshold, config.threshold_method()) {
        (Some(stage), Some(method)) => Some(timer.run("threshold", || {
            let index = config.estimators.iter().position(|s| s.method == method).expect("validated");
            let mut policy = stage.policy.clone();
            policy.seed = derive_seed(seed, "surrogate", 0);
            let tcm = infer_connections(&cms[index], &policy, Some((&spikes, &config.estimators[index], config.bin_size)))?;
            log::info!("{} connections pass the threshold", tcm.connection_count());
            tcm.write(dir, "tcm")?;
            Ok(tcm)
        })?),
        _ => None,
    };

    if let Some(options) = &config.evaluation {
        timer.run("evaluate", || {
            let mut report = match &truth {
                Some((network, recording)) => evaluate(&cms, network, recording, options.target_fpr)?,
                None => {
                    log::info!("no ground truth, ROC evaluation skipped");
                    Default::default()
                }
            };
            if let Some(tcm) = &tcm {
                report.degree_histogram = degree_histogram(&tcm.classes);
                if options.graph {
                    report.graph = graph_metrics(tcm, seed, options.reference_realizations)?;
                }
            }
            report.write_json(&dir.join("report.json"))?;
            if let Err(e) = emit_plots(&report, dir) {
                log::warn!("plots not written: {e}");
            }
            Ok(())
        })?;
    }
    manifest.stages = timer.stages;
    Ok(manifest)
}
