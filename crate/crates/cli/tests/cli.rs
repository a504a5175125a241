use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sampboost(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sampboost"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("SAMPBOOST_OUT")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn toy_csv(dir: &Path) -> String {
    let p = dir.join("toy.csv");
    std::fs::write(&p, "x,label\n0,1\n1,1\n2,-1\n3,-1\n").unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn train_on_separable_toy() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let o = sampboost(&out, &["train", "--data", &toy_csv(tmp.path()), "--gamma", "0.25", "--k-override", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let metrics = json(&out.join("metrics.json"));
    assert_eq!(metrics["train_error"], 0.0);
    assert_eq!(metrics["k"], 5);
    for f in ["model.json", "trace.ndjson", "config-echo.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn duplicate_rows_exit_3() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("dup.csv");
    std::fs::write(&p, "a,b,label\n1,2,1\n3,4,-1\n1,2,-1\n").unwrap();
    let o = sampboost(&tmp.path().join("out"), &["train", "--data", p.to_str().unwrap(), "--gamma", "0.25"]);
    assert_eq!(code(&o), 3);
    let msg = String::from_utf8_lossy(&o.stderr);
    assert!(msg.contains("duplicate") && msg.contains("[1.0, 2.0]"), "{msg}");
    assert!(json(&tmp.path().join("out/error.json"))["exit_code"] == 3);
}

#[test]
fn bad_labels_exit_3_and_bad_config_exit_2() {
    let tmp = TempDir::new().unwrap();
    let p = tmp.path().join("bad.csv");
    std::fs::write(&p, "x,label\n1,2\n").unwrap();
    let o = sampboost(&tmp.path().join("o1"), &["train", "--data", p.to_str().unwrap(), "--gamma", "0.25"]);
    assert_eq!(code(&o), 3);
    let o = sampboost(&tmp.path().join("o2"), &["train", "--data", &toy_csv(tmp.path()), "--gamma", "0.7"]);
    assert_eq!(code(&o), 2);
    let o = sampboost(&tmp.path().join("o3"), &["train", "--gamma", "0.25"]);
    assert_eq!(code(&o), 2);
    let o = sampboost(&tmp.path().join("o4"), &["train", "--data", "/nonexistent.csv", "--gamma", "0.25"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn abort_policy_exit_4() {
    let tmp = TempDir::new().unwrap();
    let o = sampboost(
        tmp.path(),
        &["train", "--task", "interval", "--n", "40", "--gamma", "0.5", "--k-override", "3", "--violation-policy", "abort"],
    );
    assert_eq!(code(&o), 4);
}

#[test]
fn replay_reproduces_model_bytes() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let o = sampboost(&a, &["train", "--task", "interval", "--n", "60", "--gamma", "0.125", "--k-override", "40", "--seed", "9"]);
    assert_eq!(code(&o), 0);
    let o = sampboost(&b, &["replay", "--config", a.join("config-echo.json").to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    for f in ["model.json", "trace.ndjson", "metrics.json", "config-echo.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn replay_detects_changed_csv() {
    let tmp = TempDir::new().unwrap();
    let csv = toy_csv(tmp.path());
    let a = tmp.path().join("a");
    assert_eq!(code(&sampboost(&a, &["train", "--data", &csv, "--gamma", "0.25", "--k-override", "3"])), 0);
    std::fs::write(&csv, "x,label\n0,1\n1,-1\n").unwrap();
    let o = sampboost(&tmp.path().join("b"), &["replay", "--config", a.join("config-echo.json").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn audit_of_stored_and_tampered_traces() {
    let tmp = TempDir::new().unwrap();
    let csv = toy_csv(tmp.path());
    let a = tmp.path().join("a");
    assert_eq!(code(&sampboost(&a, &["train", "--data", &csv, "--gamma", "0.25", "--k-override", "30"])), 0);
    let trace = a.join("trace.ndjson");
    let o = sampboost(&tmp.path().join("ok"), &["audit", "--trace", trace.to_str().unwrap(), "--data", &csv]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&tmp.path().join("ok/audit.json"))["identities_pass"], true);

    // scale one normalizer
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut round: Value = serde_json::from_str(&lines[3]).unwrap();
    let z = sampboost::hexfloat::parse(round["z"].as_str().unwrap()).unwrap();
    round["z"] = Value::from(sampboost::hexfloat::format(z * 1.5).unwrap());
    lines[3] = round.to_string();
    let bad = tmp.path().join("bad.ndjson");
    std::fs::write(&bad, lines.join("\n")).unwrap();
    let o = sampboost(&tmp.path().join("bad"), &["audit", "--trace", bad.to_str().unwrap(), "--data", &csv]);
    assert_eq!(code(&o), 5);
    assert_eq!(json(&tmp.path().join("bad/audit.json"))["identities_pass"], false);

    // structurally broken trace
    std::fs::write(&bad, &text[..text.len() / 2]).unwrap();
    let o = sampboost(&tmp.path().join("cut"), &["audit", "--trace", bad.to_str().unwrap(), "--data", &csv]);
    assert_eq!(code(&o), 5);

    let o = sampboost(&tmp.path().join("none"), &["audit", "--trace", "/no/such/trace", "--data", &csv]);
    assert_eq!(code(&o), 2);
}

#[test]
fn fresh_planted_audit_passes() {
    let tmp = TempDir::new().unwrap();
    let o = sampboost(
        tmp.path(),
        &["audit", "--task", "interval", "--n", "30", "--learner", "planted", "--gamma", "0.25", "--seeds", "20"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&tmp.path().join("audit.json"));
    assert_eq!(report["runs"].as_array().unwrap().len(), 20);
    assert_eq!(report["identities_pass"], true);
}

#[test]
fn stability_suites() {
    let tmp = TempDir::new().unwrap();
    let o = sampboost(&tmp.path().join("k1"), &["stability", "--suite", "k1-family", "--trials", "20000"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&tmp.path().join("k1/stability.json"));
    for (name, _) in summary["instances"].as_array().unwrap().iter().map(|v| (v[0].as_str().unwrap(), ())) {
        let r = json(&tmp.path().join(format!("k1/stability-{name}.json")));
        assert_eq!(r["exact"]["tv"], 0.0, "{name}");
    }

    let o = sampboost(&tmp.path().join("k2"), &["stability", "--suite", "k2-family"]);
    assert_eq!(code(&o), 0);
    let summary = json(&tmp.path().join("k2/stability.json"));
    for v in summary["instances"].as_array().unwrap() {
        let r = json(&tmp.path().join(format!("k2/stability-{}.json", v[0].as_str().unwrap())));
        assert!(r["statistical"]["chi_square"]["p_value"].as_f64().unwrap() > 0.001);
    }

    assert_eq!(code(&sampboost(&tmp.path().join("x"), &["stability", "--suite", "nope"])), 2);
}

#[test]
fn curve_cardinality_and_hash() {
    let tmp = TempDir::new().unwrap();
    let args = [
        "compare", "--grid", "50,100", "--trials", "2", "--algorithms", "sampled-boost,adaboost", "--k-override", "60",
        "--seed", "4",
    ];
    assert_eq!(code(&sampboost(&tmp.path().join("a"), &args)), 0);
    assert_eq!(code(&sampboost(&tmp.path().join("b"), &args)), 0);
    let csv = std::fs::read_to_string(tmp.path().join("a/points.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 8);
    let ha = json(&tmp.path().join("a/report.json"))["determinism_hash"].clone();
    let hb = json(&tmp.path().join("b/report.json"))["determinism_hash"].clone();
    assert_eq!(ha, hb);

    assert_eq!(code(&sampboost(&tmp.path().join("c"), &["curve", "--trials", "2"])), 2);
    assert_eq!(code(&sampboost(&tmp.path().join("d"), &["curve", "--grid", "0"])), 2);
}

#[test]
fn compress_check_passes() {
    let tmp = TempDir::new().unwrap();
    let o = sampboost(tmp.path(), &["compress-check", "--task", "interval", "--n", "40", "--gamma", "0.125", "--k-override", "50"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&tmp.path().join("compress-check.json"));
    assert_eq!(r["train_mismatches"], 0);
    assert_eq!(r["probe_mismatches"], 0);
    assert!(r["compression_size"].as_u64().unwrap() <= 40);
}

#[test]
fn output_directory_from_environment() {
    let tmp = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sampboost"))
        .args(["stability", "--suite", "k1-family", "--trials", "1000"])
        .env("SAMPBOOST_OUT", tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(tmp.path().join("config-echo.json").exists());
}
