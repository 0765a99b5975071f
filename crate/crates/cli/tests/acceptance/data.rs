//! Simulated ER recordings shared by the accuracy criteria. Each recording is
//! cached under the cargo test tmp dir together with the simulation wall
//! time measured when it was produced.

use std::path::PathBuf;
use std::time::Instant;

use serde_json::json;
use spikeconn::rng::{derive_seed, stream};
use spikeconn::simulator::{detect_network_bursts, select_recording_subset, simulate, SimulationConfig};
use spikeconn::spikedata::{read_sdf_json, write_sdf_json, SpikeTrainSet};
use spikeconn::topology::{assign_weights_and_delays, generate_topology, Family, GroundTruthNetwork, TopologyMeta, TopologySpec, WeightParams};

pub const NEURONS: usize = 1000;
pub const SUBSET: usize = 100;
pub const MINUTES: u32 = 60;
pub const SEEDS: [u64; 3] = [1, 2, 3];
const CACHE_VERSION: u32 = 1;

/// Excitatory weight multiplier per connection probability. Chosen so that
/// both densities burst at roughly 150–250 bursts per minute.
pub fn weight_scale(p: f64) -> f64 {
    if p < 0.075 {
        6.5
    } else {
        3.0
    }
}

pub struct Dataset {
    pub seed: u64,
    pub network: GroundTruthNetwork,
    pub channels: Vec<usize>,
    pub spikes: SpikeTrainSet,
    pub simulation_seconds: f64,
    pub bursts_per_minute: f64,
    pub cached: bool,
}

impl Dataset {
    pub fn truth(&self) -> ndarray::Array2<i8> {
        self.network.sign_matrix(&self.channels)
    }
}

fn cache_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance")
}

pub fn load(p: f64, seed: u64) -> Dataset {
    let topology = TopologySpec::new(NEURONS, Family::er(p));
    let mask = generate_topology(&topology, &mut stream(seed, "topology", 0)).expect("topology");
    let meta = TopologyMeta {
        family: "ER".into(),
        params: serde_json::to_value(&topology).unwrap(),
        seed,
    };
    let weights = WeightParams::with_scale(weight_scale(p));
    let network = assign_weights_and_delays(&mask, &weights, meta, &mut stream(seed, "weights", 0)).expect("weights");
    let channels = select_recording_subset(&network, SUBSET, &mut stream(seed, "subset", 0)).expect("subset");

    let stem = format!("v{CACHE_VERSION}_er_p{p}_w{}_s{seed}_{MINUTES}min", weight_scale(p));
    let dir = cache_dir();
    let sdf = dir.join(format!("{stem}.sdf.json"));
    let info = dir.join(format!("{stem}.json"));
    if let (Ok(spikes), Ok(text)) = (read_sdf_json(&sdf), std::fs::read_to_string(&info)) {
        let v: serde_json::Value = serde_json::from_str(&text).expect("cache info");
        return Dataset {
            seed,
            network,
            channels,
            spikes,
            simulation_seconds: v["simulation_seconds"].as_f64().unwrap(),
            bursts_per_minute: v["bursts_per_minute"].as_f64().unwrap(),
            cached: true,
        };
    }

    let config = SimulationConfig::new(MINUTES * 60_000, derive_seed(seed, "simulation", 0));
    let start = Instant::now();
    let all = simulate(&network, &config).expect("simulation");
    let simulation_seconds = start.elapsed().as_secs_f64();
    let bursts_per_minute = detect_network_bursts(&all, 50, 0.25).expect("bursts").bursts_per_minute;
    let spikes = all.select(&channels).expect("subset");
    drop(all);
    std::fs::create_dir_all(&dir).expect("cache dir");
    write_sdf_json(&spikes, &sdf).expect("cache write");
    let v = json!({ "simulation_seconds": simulation_seconds, "bursts_per_minute": bursts_per_minute });
    std::fs::write(&info, v.to_string()).expect("cache write");
    Dataset {
        seed,
        network,
        channels,
        spikes,
        simulation_seconds,
        bursts_per_minute,
        cached: false,
    }
}
