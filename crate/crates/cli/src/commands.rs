use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use spikeconn::analysis::{
    benchmark_estimators, classify_effect_changes, emit_plots, small_world_ness, BenchCase, EvaluationReport, Graph,
};
use spikeconn::estimators::{estimate_cms, EstimatorSpec, Method, Normalization};
use spikeconn::inference::{infer_connections, SurrogateCriterion, ThresholdKind, ThresholdPolicy};
use spikeconn::rng::{derive_seed, stream};
use spikeconn::simulator::{NoiseParams, SimulationConfig};
use spikeconn::spikedata::{read_sdf_json, write_sdf_json, BinaryRaster};
use spikeconn::topology::{Family, GroundTruthNetwork, TopologySpec, WeightParams};
use spikeconn::tspe::TspeParams;

use crate::config::PipelineConfig;
use crate::error::{io_error, CliError, CliResult};
use crate::pipeline::run_pipeline;
use crate::stages::{
    build_network, cm_stem, degree_histogram, ensure_dir, evaluate, graph_metrics, read_cm, read_tcm, record, Recording,
};
use crate::{Cli, Command};

fn serde_enum<T: DeserializeOwned>(s: &str) -> Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    Method::parse(s).map_err(|e| e.to_string())
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    std::fs::write(path, serde_json::to_string_pretty(value)?).map_err(|e| io_error(path, e))
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Number of neurons
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Topology family: SII, ER, IC or BA
    #[arg(long, default_value = "ER")]
    family: String,
    /// ER connection probability
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// SII excitatory out-degree
    #[arg(long, default_value_t = 100)]
    out_degree: usize,
    /// IC minimum degree
    #[arg(long, default_value_t = 10)]
    min_degree: usize,
    /// IC power-law exponent
    #[arg(long, default_value_t = 2.0)]
    gamma: f64,
    /// BA incoming edges per new node
    #[arg(long, default_value_t = 12)]
    m_in: usize,
    /// BA outgoing edges per new node
    #[arg(long, default_value_t = 12)]
    m_out: usize,
    /// Multiplier of the log-normal excitatory weights
    #[arg(long, default_value_t = 1.0)]
    weight_scale: f64,
}

impl GenerateArgs {
    fn topology(&self) -> CliResult<TopologySpec> {
        let family = match self.family.to_uppercase().as_str() {
            "SII" => Family::Sii { out_degree: self.out_degree },
            "ER" => Family::er(self.p),
            "IC" => match Family::ic() {
                Family::Ic { cutoff_factor, .. } => Family::Ic {
                    min_degree: self.min_degree,
                    gamma: self.gamma,
                    cutoff_factor,
                },
                other => other,
            },
            "BA" => match Family::ba() {
                Family::Ba { core_size, .. } => Family::Ba {
                    m_in: self.m_in,
                    m_out: self.m_out,
                    core_size,
                },
                other => other,
            },
            other => return Err(CliError::Config(format!("--family: unknown family `{other}` (SII, ER, IC, BA)"))),
        };
        Ok(TopologySpec::new(self.n, family))
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Ground-truth network (network.json)
    #[arg(long)]
    network: PathBuf,
    /// Recording length in ms
    #[arg(long, default_value_t = 60_000)]
    duration_ms: u32,
    /// Recorded channels (4/5 excitatory, 1/5 inhibitory)
    #[arg(long, default_value_t = 100)]
    subset: usize,
    /// Neurons receiving noise input per ms
    #[arg(long, default_value_t = 1)]
    noise_per_tick: u32,
    /// Noise input amplitude
    #[arg(long, default_value_t = 20.0)]
    noise_amplitude: f64,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// Methods: NCC, NCCCI, MI, D1TE, DTE, DTECI, DHOTE, DHOTECI, CDHOTE, TSPE
    #[arg(long = "method", value_delimiter = ',', value_parser = parse_method)]
    methods: Vec<Method>,
    /// Largest delay in bins (NCC, MI, TE and TSPE)
    #[arg(long, default_value_t = 25)]
    d_max: usize,
    /// Coincidence-index window in bins
    #[arg(long, default_value_t = 4)]
    tau: usize,
    /// Target history order (DHOTE)
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Source history order (DHOTE)
    #[arg(long, default_value_t = 2)]
    l: usize,
    /// Correlogram normalization: raw, geometric, zscore or zscore_no_mean
    #[arg(long, default_value = "zscore", value_parser = serde_enum::<Normalization>)]
    normalization: Normalization,
    /// TSPE edge-filter observation windows a
    #[arg(long, value_delimiter = ',', default_value = "3,4,5,6,7,8")]
    a_list: Vec<usize>,
    /// TSPE edge-filter spike windows b
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
    b_list: Vec<usize>,
    /// TSPE edge-filter gaps c
    #[arg(long, value_delimiter = ',', default_value = "0")]
    c_list: Vec<usize>,
    /// TSPE: divide each delay of the correlograms by its sum over all pairs
    #[arg(long)]
    flag_norm: bool,
    /// TSPE: subtract the mean in the correlogram z-score
    #[arg(long)]
    mean_subtraction: bool,
}

impl EstimatorArgs {
    fn specs(&self, config: Option<&PipelineConfig>) -> Vec<EstimatorSpec> {
        if self.methods.is_empty() {
            if let Some(c) = config.filter(|c| !c.estimators.is_empty()) {
                return c.estimators.clone();
            }
        }
        let methods = if self.methods.is_empty() { vec![Method::Tspe] } else { self.methods.clone() };
        methods
            .into_iter()
            .map(|method| EstimatorSpec {
                method,
                d_max: self.d_max,
                tau: self.tau,
                k: self.k,
                l: self.l,
                normalization: self.normalization,
                tspe: TspeParams {
                    d_max: self.d_max,
                    a_list: self.a_list.clone(),
                    b_list: self.b_list.clone(),
                    c_list: self.c_list.clone(),
                    flag_norm: self.flag_norm,
                    mean_subtraction: self.mean_subtraction,
                },
            })
            .collect()
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Spike trains (SDF JSON)
    #[arg(long)]
    spikes: PathBuf,
    #[command(flatten)]
    estimator: EstimatorArgs,
    /// Bin width in samples
    #[arg(long, default_value_t = 1)]
    bin_size: u32,
    /// Floating-point precision of the estimators: f64 or f32
    #[arg(long, default_value = "f64")]
    precision: String,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Connectivity matrix (cm_<method>.csv with its JSON sidecar)
    #[arg(long)]
    cm: PathBuf,
    /// Easy threshold: mean + k·SD of all matrix values (k = 4 when no policy is given)
    #[arg(long, conflicts_with = "surrogates")]
    easy_k: Option<f64>,
    /// Surrogate threshold with this many dithered surrogates (100 to 1000)
    #[arg(long)]
    surrogates: Option<usize>,
    /// Surrogate dithering window in samples
    #[arg(long, default_value_t = 2)]
    window: u32,
    /// Surrogate criterion: mean4sd, minmax, minmax_sd or sign_split
    #[arg(long, default_value = "mean4sd", value_parser = serde_enum::<SurrogateCriterion>)]
    criterion: SurrogateCriterion,
    /// Separate excitatory (+1) and inhibitory (−1) classes; needs a signed method
    #[arg(long)]
    signed: bool,
    /// Spike trains the matrix was estimated from (surrogate thresholds)
    #[arg(long)]
    spikes: Option<PathBuf>,
    /// Bin width in samples used for the matrix
    #[arg(long, default_value_t = 1)]
    bin_size: u32,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Ground-truth network
    #[arg(long)]
    network: PathBuf,
    /// Channel-to-neuron mapping of the recording
    #[arg(long)]
    recording: PathBuf,
    /// Connectivity matrices to evaluate
    #[arg(long = "cm", required = true)]
    cms: Vec<PathBuf>,
    /// Thresholded matrix for graph metrics and the degree histogram
    #[arg(long)]
    tcm: Option<PathBuf>,
    /// False-positive rate of the operating point
    #[arg(long, default_value_t = 0.01)]
    target_fpr: f64,
    /// Random reference graphs for small-world-ness
    #[arg(long, default_value_t = 10)]
    reference: usize,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Thresholded matrix
    #[arg(long, conflicts_with = "network")]
    tcm: Option<PathBuf>,
    /// Ground-truth network instead of an estimate
    #[arg(long)]
    network: Option<PathBuf>,
    /// Random reference graphs for small-world-ness
    #[arg(long, default_value_t = 10)]
    reference: usize,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    /// Earlier thresholded snapshot
    #[arg(long)]
    before: PathBuf,
    /// Later thresholded snapshot
    #[arg(long)]
    after: PathBuf,
    /// |strength| quantile separating strong from weak effects
    #[arg(long, default_value_t = 0.75)]
    strong_quantile: f64,
    /// Relative strength change still counted as the same
    #[arg(long, default_value_t = 0.05)]
    same_tol: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Spike trains to time on (truncated to each channel count and duration)
    #[arg(long)]
    spikes: PathBuf,
    /// Channel counts
    #[arg(long, value_delimiter = ',', default_value = "100")]
    channels: Vec<usize>,
    /// Durations in minutes
    #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
    durations: Vec<f64>,
    /// Methods to time
    #[arg(long, value_delimiter = ',', value_parser = parse_method, default_value = "NCC,TSPE,DTE,DHOTE")]
    methods: Vec<Method>,
    /// Thread settings to time separately (0 = default pool)
    #[arg(long, value_delimiter = ',', default_value = "1,0")]
    thread_modes: Vec<usize>,
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    let config = match &g.config {
        Some(path) => {
            let mut c = PipelineConfig::load(path)?;
            if let Some(seed) = g.seed {
                c.seed = seed;
            }
            Some(c)
        }
        None => None,
    };
    let seed = g.seed.or(config.as_ref().map(|c| c.seed)).unwrap_or(0);
    let out = &g
        .out
        .clone()
        .or(config.as_ref().and_then(|c| c.out.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    match &cli.command {
        Command::Pipeline => {
            let config = config.ok_or_else(|| CliError::Config("pipeline needs --config".into()))?;
            let manifest = run_pipeline(&config, out)?;
            log::info!("wrote {} files to {}", manifest.files.len() + 1, out.display());
            Ok(())
        }
        Command::Generate(a) => generate(a, config.as_ref(), seed, out),
        Command::Simulate(a) => simulate_cmd(a, config.as_ref(), seed, out),
        Command::Estimate(a) => estimate(a, config.as_ref(), out),
        Command::Threshold(a) => threshold(a, seed, out),
        Command::Evaluate(a) => evaluate_cmd(a, seed, out),
        Command::Graph(a) => graph(a, seed, out),
        Command::Dynamics(a) => dynamics(a, out),
        Command::Bench(a) => bench(a, out),
    }
}

fn generate(a: &GenerateArgs, config: Option<&PipelineConfig>, seed: u64, out: &Path) -> CliResult<()> {
    let (topology, weights) = match config.and_then(|c| c.topology.clone().map(|t| (t, c.weights))) {
        Some(pair) => pair,
        None => (a.topology()?, WeightParams::with_scale(a.weight_scale)),
    };
    topology.validate().map_err(|e| CliError::in_field("topology", e))?;
    let network = build_network(&topology, &weights, None, seed)?;
    ensure_dir(out)?;
    network.write_json(&out.join("network.json"))?;
    log::info!("{} neurons, {} synapses", network.len(), network.edge_count());
    Ok(())
}

fn simulate_cmd(a: &SimulateArgs, config: Option<&PipelineConfig>, seed: u64, out: &Path) -> CliResult<()> {
    let network = GroundTruthNetwork::read_json(&a.network)?;
    let simulation = match config.and_then(|c| c.simulation.clone()) {
        Some(s) => s,
        None => SimulationConfig {
            noise: NoiseParams {
                neurons_per_tick: a.noise_per_tick,
                amplitude: a.noise_amplitude,
            },
            subset_size: a.subset,
            ..SimulationConfig::new(a.duration_ms, 0)
        },
    };
    simulation.validate(network.len()).map_err(|e| CliError::in_field("simulation", e))?;
    let (set, recording) = record(&network, &simulation, seed)?;
    ensure_dir(out)?;
    write_sdf_json(&set, &out.join("spikes.sdf.json"))?;
    recording.write(&out.join("recording.json"))
}

fn estimate(a: &EstimateArgs, config: Option<&PipelineConfig>, out: &Path) -> CliResult<()> {
    let specs = a.estimator.specs(config);
    for (i, spec) in specs.iter().enumerate() {
        spec.validate().map_err(|e| CliError::in_field(&format!("estimator {i}"), e))?;
    }
    if a.bin_size == 0 {
        return Err(CliError::Config("--bin-size: must be at least 1".into()));
    }
    let set = read_sdf_json(&a.spikes)?;
    let raster = BinaryRaster::from_set(&set, a.bin_size)?;
    ensure_dir(out)?;
    match a.precision.as_str() {
        "f64" => {
            for cm in estimate_cms::<f64>(&raster, &specs)? {
                cm.write(out, &cm_stem(cm.method))?;
            }
        }
        "f32" => {
            for cm in estimate_cms::<f32>(&raster, &specs)? {
                cm.write(out, &cm_stem(cm.method))?;
            }
        }
        other => return Err(CliError::Config(format!("--precision: `{other}` is not f64 or f32"))),
    }
    Ok(())
}

fn threshold(a: &ThresholdArgs, seed: u64, out: &Path) -> CliResult<()> {
    let cm = read_cm(&a.cm)?;
    let mut policy = match (a.easy_k, a.surrogates) {
        (Some(k), None) => ThresholdPolicy::easy(k),
        (None, Some(n)) => ThresholdPolicy::surrogate(n, a.window, a.criterion, derive_seed(seed, "surrogate", 0)),
        (None, None) => ThresholdPolicy::easy(4.0),
        (Some(_), Some(_)) => unreachable!("clap rejects both"),
    };
    policy.signed = a.signed;
    policy.validate().map_err(|e| CliError::in_field("threshold", e))?;
    let tcm = match policy.kind {
        ThresholdKind::Easy { .. } => infer_connections(&cm, &policy, None)?,
        ThresholdKind::Surrogate { .. } => {
            let path = a.spikes.as_ref().ok_or_else(|| CliError::Config("--spikes: required for surrogate thresholds".into()))?;
            let set = read_sdf_json(path)?;
            let spec: EstimatorSpec = serde_json::from_value(cm.params.clone())
                .map_err(|e| CliError::Config(format!("{}: estimator parameters unreadable: {e}", a.cm.display())))?;
            infer_connections(&cm, &policy, Some((&set, &spec, a.bin_size)))?
        }
    };
    log::info!("{} connections pass", tcm.connection_count());
    ensure_dir(out)?;
    Ok(tcm.write(out, "tcm")?)
}

fn evaluate_cmd(a: &EvaluateArgs, seed: u64, out: &Path) -> CliResult<()> {
    let network = GroundTruthNetwork::read_json(&a.network)?;
    let recording = Recording::read(&a.recording)?;
    let cms = a.cms.iter().map(|p| read_cm(p)).collect::<CliResult<Vec<_>>>()?;
    let mut report = evaluate(&cms, &network, &recording, a.target_fpr)?;
    if let Some(path) = &a.tcm {
        let tcm = read_tcm(path)?;
        report.degree_histogram = degree_histogram(&tcm.classes);
        report.graph = graph_metrics(&tcm, seed, a.reference)?;
    }
    ensure_dir(out)?;
    report.write_json(&out.join("report.json"))?;
    if let Err(e) = emit_plots(&report, out) {
        log::warn!("plots not written: {e}");
    }
    Ok(())
}

fn graph(a: &GraphArgs, seed: u64, out: &Path) -> CliResult<()> {
    let g = match (&a.tcm, &a.network) {
        (Some(path), None) => Graph::from_classes(&read_tcm(path)?.classes),
        (None, Some(path)) => {
            let net = GroundTruthNetwork::read_json(path)?;
            Graph::symmetrized(net.len(), |i, j| net.weight(i, j) != 0.0)
        }
        _ => return Err(CliError::Config("graph needs exactly one of --tcm or --network".into())),
    };
    let metrics = small_world_ness(&g, &mut stream(seed, "graph", 0), a.reference)?;
    ensure_dir(out)?;
    write_json(&out.join("graph.json"), &metrics)
}

fn dynamics(a: &DynamicsArgs, out: &Path) -> CliResult<()> {
    let report = classify_effect_changes(&read_tcm(&a.before)?, &read_tcm(&a.after)?, a.strong_quantile, a.same_tol)?;
    ensure_dir(out)?;
    write_json(&out.join("dynamics.json"), &report)
}

fn bench(a: &BenchArgs, out: &Path) -> CliResult<()> {
    let set = read_sdf_json(&a.spikes)?;
    let specs: Vec<EstimatorSpec> = a.methods.iter().map(|&m| EstimatorSpec::new(m)).collect();
    let mut report = EvaluationReport::default();
    for &k in &a.channels {
        if k < 2 || k > set.channel_count() {
            return Err(CliError::Config(format!("--channels: {k} outside [2, {}]", set.channel_count())));
        }
        let subset = set.select(&(0..k).collect::<Vec<_>>())?;
        let mut rasters = Vec::new();
        for &minutes in &a.durations {
            let samples = (minutes * 60.0 * set.sampling_rate_hz()).round() as u32;
            rasters.push((minutes, BinaryRaster::from_set(&subset.truncate(samples)?, 1)?));
        }
        let cases: Vec<BenchCase<'_>> = rasters.iter().map(|(m, r)| BenchCase { raster: r, duration_min: *m }).collect();
        report.timing.extend(benchmark_estimators(&cases, &specs, &a.thread_modes)?);
    }
    ensure_dir(out)?;
    std::fs::write(out.join("timing.csv"), report.timing_csv()).map_err(|e| io_error(out.join("timing.csv"), e))?;
    Ok(report.write_json(&out.join("bench.json"))?)
}
