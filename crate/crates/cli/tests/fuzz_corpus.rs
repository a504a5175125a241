//! The checked-in fuzz seeds stay in step with the formats they exercise.

use std::fs;
use std::path::PathBuf;

use sampboost::boost::{BoostConfig, BoostTrace, VotingClassifier, WeightedVotingClassifier};
use sampboost::compress::CompressionSequence;
use sampboost::dataset::Dataset;
use sampboost::hexfloat;
use sampboost::weak::Hypothesis;
use sampboost_cli::config::ConfigEcho;

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|entry| {
            let path = entry.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&path).unwrap())
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

/// Seeds with these name prefixes are malformed on purpose.
fn expect_ok(name: &str) -> bool {
    !["duplicate", "nonfinite", "truncated"].iter().any(|p| name.starts_with(p))
}

#[test]
fn csv_seeds() {
    for (name, text) in seeds("parse_csv") {
        assert_eq!(Dataset::from_csv_reader(text.as_bytes()).is_ok(), expect_ok(&name), "{name}");
    }
}

#[test]
fn hypothesis_seeds() {
    for (name, text) in seeds("parse_hypothesis") {
        let h: Hypothesis = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        h.validate().unwrap();
    }
}

#[test]
fn trace_seeds() {
    for (name, text) in seeds("parse_trace") {
        assert_eq!(BoostTrace::from_ndjson(&text).is_ok(), expect_ok(&name), "{name}");
    }
}

#[test]
fn compression_seeds() {
    for (name, text) in seeds("parse_compression") {
        CompressionSequence::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
}

#[test]
fn model_seeds() {
    for (name, text) in seeds("parse_model") {
        let ok = VotingClassifier::from_json(&text).is_ok() || WeightedVotingClassifier::from_json(&text).is_ok();
        assert!(ok, "{name}");
    }
}

#[test]
fn hexfloat_seeds() {
    for (name, text) in seeds("parse_hexfloat") {
        assert_eq!(hexfloat::parse(&text).is_ok(), expect_ok(&name), "{name}");
    }
}

#[test]
fn config_seeds() {
    for (name, text) in seeds("parse_config") {
        let ok = serde_json::from_str::<ConfigEcho>(&text).is_ok()
            || serde_json::from_str::<BoostConfig>(&text).is_ok_and(|c| c.validate().is_ok());
        assert!(ok, "{name}");
    }
}
