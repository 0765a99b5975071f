use proptest::prelude::*;
use spikeconn::analysis::evaluate_method;
use spikeconn::estimators::{estimate_cm, EstimatorSpec, Method};
use spikeconn::inference::{infer_connections, ThresholdPolicy};
use spikeconn::rng::{derive_seed, stream};
use spikeconn::simulator::{select_recording_subset, simulate, SimulationConfig};
use spikeconn::spikedata::{read_sdf_json, write_sdf_json, BinaryRaster, SpikeTrainSet};
use spikeconn::topology::{build_network, Family, TopologySpec, WeightParams};
use spikeconn::tspe::{tspe, TspeParams};

fn recorded(seed: u64) -> (spikeconn::topology::GroundTruthNetwork, Vec<usize>, SpikeTrainSet) {
    let spec = TopologySpec::new(200, Family::er(0.1));
    let network = build_network(&spec, &WeightParams::with_scale(8.0), seed, &mut stream(seed, "topology", 0)).unwrap();
    let channels = select_recording_subset(&network, 40, &mut stream(seed, "subset", 0)).unwrap();
    let all = simulate(&network, &SimulationConfig::new(120_000, derive_seed(seed, "simulation", 0))).unwrap();
    let spikes = all.select(&channels).unwrap();
    (network, channels, spikes)
}

#[test]
fn simulated_connectivity_is_recovered_above_chance() {
    let (network, channels, spikes) = recorded(3);
    let raster = BinaryRaster::from_set(&spikes, 1).unwrap();
    let mut spec = EstimatorSpec::new(Method::Tspe);
    spec.tspe.flag_norm = true;
    let cm = estimate_cm::<f64>(&raster, &spec).unwrap();
    let truth = network.sign_matrix(&channels);
    let eval = evaluate_method(&cm, &truth, 0.01).unwrap();
    assert!(eval.auc > 0.75, "AUC {}", eval.auc);

    let tcm = infer_connections(&cm, &ThresholdPolicy::easy(2.0), None).unwrap();
    let called = tcm.classes.iter().filter(|&&c| c != 0).count();
    let hits = tcm.classes.iter().zip(truth.iter()).filter(|(&c, &t)| c != 0 && t != 0).count();
    assert!(called > 0);
    assert!(hits as f64 / called as f64 > 0.5, "{hits} of {called} calls are true connections");
    assert!(tcm.classes.diag().iter().all(|&c| c == 0));
}

#[test]
fn single_and_double_precision_agree_on_simulated_data() {
    let (_, _, spikes) = recorded(4);
    let raster = BinaryRaster::from_set(&spikes, 1).unwrap();
    let params = TspeParams::default();
    let a = tspe::<f64>(&raster, &params).unwrap();
    let b = tspe::<f32>(&raster, &params).unwrap();
    let scale = a.cm.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for (x, y) in a.cm.iter().zip(b.cm.iter()) {
        assert!((x - *y as f64).abs() <= 1e-4 * scale, "{x} vs {y}");
    }
}

#[test]
fn simulation_is_reproducible_from_the_seed() {
    let (_, _, a) = recorded(5);
    let (_, _, b) = recorded(5);
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sdf_files_round_trip(times in prop::collection::vec(prop::collection::btree_set(1u32..5000, 0..50), 1..8)) {
        let set = SpikeTrainSet::from_times(times.into_iter().map(|t| t.into_iter().collect()).collect(), 1000.0, 5000).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.sdf.json");
        write_sdf_json(&set, &path).unwrap();
        prop_assert_eq!(read_sdf_json(&path).unwrap(), set);
    }
}
