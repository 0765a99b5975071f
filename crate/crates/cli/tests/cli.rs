use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_spikeconn");

fn run(cwd: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(cwd).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, config: &Value) {
    fs::write(dir.join(name), serde_json::to_string_pretty(config).unwrap()).unwrap();
}

fn small_er() -> Value {
    json!({
        "seed": 11,
        "topology": {"n": 100, "family": "ER", "p": 0.1},
        "weights": {"scale": 3.0},
        "simulation": {"duration_ms": 10000, "subset_size": 30},
        "estimators": [{"method": "TSPE"}, {"method": "NCCCI"}],
        "threshold": {"kind": "easy", "k": 4.0, "signed": true},
        "evaluation": {"target_fpr": 0.01, "reference_realizations": 3}
    })
}

fn listing(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

fn manifest_files(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    serde_json::from_str::<Value>(&text).unwrap()["files"].clone()
}

#[test]
fn help_documents_estimator_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    for sub in ["generate", "simulate", "estimate", "threshold", "evaluate", "graph", "dynamics", "bench", "pipeline"] {
        let out = run(tmp.path(), &[sub, "--help"]);
        assert!(out.status.success(), "{sub} --help failed");
        let text = String::from_utf8(out.stdout).unwrap();
        for flag in ["--seed", "--threads", "--out", "--config", "--quiet"] {
            assert!(text.contains(flag), "{sub} --help lacks {flag}");
        }
    }
    let estimate = String::from_utf8(run(tmp.path(), &["estimate", "--help"]).stdout).unwrap();
    for needle in [
        "--d-max <D_MAX>",
        "[default: 25]",
        "[default: 3,4,5,6,7,8]",
        "[default: 2,3,4,5,6]",
        "[default: 0]",
        "--tau <TAU>",
        "[default: 4]",
        "--k <K>",
        "--l <L>",
    ] {
        assert!(estimate.contains(needle), "estimate --help lacks {needle}");
    }
    let threshold = String::from_utf8(run(tmp.path(), &["threshold", "--help"]).stdout).unwrap();
    for needle in ["--surrogates", "100 to 1000", "--window <WINDOW>", "[default: 2]", "[default: mean4sd]"] {
        assert!(threshold.contains(needle), "threshold --help lacks {needle}");
    }
}

#[test]
fn pipeline_writes_contract_files_and_is_thread_independent() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "er.json", &small_er());
    let a = run(tmp.path(), &["--quiet", "--config", "er.json", "--threads", "1", "--out", "a", "pipeline"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(tmp.path(), &["--quiet", "--config", "er.json", "--threads", "3", "--out", "b", "pipeline"]);
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));

    let files = listing(&tmp.path().join("a"));
    for name in ["network.json", "spikes.sdf.json", "cm_tspe.csv", "tcm.csv", "report.json", "manifest.json"] {
        assert!(files.contains(name), "missing {name}");
    }
    assert_eq!(files, listing(&tmp.path().join("b")));
    assert_eq!(manifest_files(&tmp.path().join("a")), manifest_files(&tmp.path().join("b")));
    for name in files.iter().filter(|n| *n != "manifest.json") {
        let x = fs::read(tmp.path().join("a").join(name)).unwrap();
        let y = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert!(x == y, "{name} differs between thread counts");
    }
    // Nothing lands outside the output directory.
    assert_eq!(listing(tmp.path()), ["a", "b", "er.json"].iter().map(|s| s.to_string()).collect());
}

#[test]
fn seed_flag_changes_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "er.json", &small_er());
    assert!(run(tmp.path(), &["--quiet", "--config", "er.json", "--out", "a", "pipeline"]).status.success());
    assert!(run(tmp.path(), &["--quiet", "--config", "er.json", "--seed", "12", "--out", "b", "pipeline"]).status.success());
    let a = manifest_files(&tmp.path().join("a"));
    let b = manifest_files(&tmp.path().join("b"));
    assert_ne!(a["spikes.sdf.json"], b["spikes.sdf.json"]);
}

#[test]
fn missing_sdf_fails_without_partial_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let config = json!({
        "input": {"spikes": "does_not_exist.sdf.json"},
        "estimators": [{"method": "TSPE"}]
    });
    write_config(tmp.path(), "c.json", &config);
    let out = run(tmp.path(), &["--config", "c.json", "--out", "run", "pipeline"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("does_not_exist.sdf.json"));
    let run_dir = tmp.path().join("run");
    assert!(!run_dir.exists() || listing(&run_dir).is_empty());
}

#[test]
fn invalid_field_is_named_with_exit_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = small_er();
    config["topology"]["p"] = json!(1.5);
    write_config(tmp.path(), "bad.json", &config);
    let out = run(tmp.path(), &["--config", "bad.json", "--out", "run", "pipeline"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("topology") && err.contains('p'), "{err}");
    assert!(!tmp.path().join("run").exists());

    let mut config = small_er();
    config["estimatorz"] = json!([]);
    write_config(tmp.path(), "typo.json", &config);
    let out = run(tmp.path(), &["--config", "typo.json", "pipeline"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("estimatorz"));
}

#[test]
fn estimate_only_pipeline_on_existing_recording() {
    let tmp = tempfile::tempdir().unwrap();
    write_config(tmp.path(), "er.json", &small_er());
    assert!(run(tmp.path(), &["--quiet", "--config", "er.json", "--out", "full", "pipeline"]).status.success());
    let config = json!({
        "seed": 1,
        "input": {"spikes": "full/spikes.sdf.json"},
        "estimators": [{"method": "TSPE"}]
    });
    write_config(tmp.path(), "est.json", &config);
    let out = run(tmp.path(), &["--quiet", "--config", "est.json", "--out", "est", "pipeline"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let files = listing(&tmp.path().join("est"));
    assert!(files.contains("cm_tspe.csv") && files.contains("manifest.json"));
    assert!(!files.contains("network.json") && !files.contains("report.json"));
    // Same matrix as the full run.
    assert_eq!(
        fs::read(tmp.path().join("est/cm_tspe.csv")).unwrap(),
        fs::read(tmp.path().join("full/cm_tspe.csv")).unwrap()
    );
}

#[test]
fn subcommands_chain_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let ok = |args: &[&str]| {
        let out = run(dir, args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    };
    ok(&["--quiet", "--seed", "5", "--out", "s", "generate", "--n", "100", "--family", "SII", "--out-degree", "10"]);
    ok(&["--quiet", "--seed", "5", "--out", "s", "simulate", "--network", "s/network.json", "--duration-ms", "5000", "--subset", "20"]);
    ok(&["--quiet", "--out", "s", "estimate", "--spikes", "s/spikes.sdf.json", "--method", "TSPE,DTE"]);
    ok(&["--quiet", "--out", "s", "threshold", "--cm", "s/cm_tspe.csv", "--easy-k", "2", "--signed"]);
    ok(&[
        "--quiet", "--out", "s", "evaluate", "--network", "s/network.json", "--recording", "s/recording.json", "--cm",
        "s/cm_tspe.csv", "--cm", "s/cm_dte.csv", "--tcm", "s/tcm.csv", "--reference", "2",
    ]);
    ok(&["--quiet", "--out", "s", "graph", "--tcm", "s/tcm.csv", "--reference", "2"]);
    ok(&["--quiet", "--out", "s", "dynamics", "--before", "s/tcm.csv", "--after", "s/tcm.csv"]);
    let files = listing(&dir.join("s"));
    for name in ["report.json", "roc.csv", "roc.svg", "graph.json", "dynamics.json", "tcm_strengths.csv"] {
        assert!(files.contains(name), "missing {name}");
    }
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.join("s/report.json")).unwrap()).unwrap();
    assert_eq!(report["methods"].as_array().unwrap().len(), 2);
    let roc = fs::read_to_string(dir.join("s/roc.csv")).unwrap();
    assert!(roc.contains("TSPE") && roc.contains("DTE"));
}
