use std::fs::File;
use std::io::BufReader;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use sha2::{Digest, Sha256};

use sampboost::bench::{compare_report, gen_task, learning_curve, points_to_csv};
use sampboost::boost::{sampled_boost, BoostTrace, Ensemble};
use sampboost::compress::{compression_size, encode, reconstruct};
use sampboost::dataset::Dataset;
use sampboost::rng::{derive_stream_id, RngStream};
use sampboost::verify::{
    margin_audit, stability_test, suite, telescoping_check, zk_check, Verdict, TELESCOPING_TOLERANCE, ZK_TOLERANCE,
};
use sampboost::weak::{stump_vc_dim, Hypothesis, PlantedLearner, StumpLearner, WeakLearner};
use sampboost::SCHEMA_VERSION;

use crate::config::*;
use crate::{write_file, write_json, CliError, CliResult, EXIT_CHECK, EXIT_DATASET};

pub fn run(config: &RunConfig, out: &Path) -> CliResult<()> {
    match config {
        RunConfig::Train(c) => train(c, out),
        RunConfig::Audit(c) => audit(c, out),
        RunConfig::Stability(c) => stability(c, out),
        RunConfig::Curve(c) | RunConfig::Compare(c) => sweep(c, out),
        RunConfig::CompressCheck(c) => compress_check(c, out),
    }
}

pub fn load_csv(path: &Path) -> CliResult<Dataset> {
    let file = File::open(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Dataset::from_csv_reader(BufReader::new(file))
        .map_err(|e| CliError::new(EXIT_DATASET, format!("{}: {e}", path.display())))
}

struct Loaded {
    train: Dataset,
    test: Option<Dataset>,
    target: Option<Hypothesis>,
}

fn load(source: &DataSource) -> CliResult<Loaded> {
    match source {
        DataSource::Csv { path, digest } => {
            let train = load_csv(path)?;
            if &train.digest() != digest {
                return Err(CliError::new(
                    EXIT_DATASET,
                    format!("{} no longer matches digest {digest}", path.display()),
                ));
            }
            Ok(Loaded { train, test: None, target: None })
        }
        DataSource::Task(spec) => {
            let task = gen_task(spec)?;
            Ok(Loaded { train: task.train, test: Some(task.test), target: Some(task.target) })
        }
    }
}

/// The planted learner is planted on the task concept, or on the dataset's
/// own labels for CSV input.
fn make_learner(cfg: &LearnerConfig, loaded: &Loaded, gamma: f64) -> CliResult<Arc<dyn WeakLearner>> {
    let dim = loaded.train.dim();
    Ok(match cfg.kind {
        LearnerKind::Stump => Arc::new(StumpLearner::new(gamma, dim)?),
        LearnerKind::Planted => {
            let target = loaded.target.clone().unwrap_or_else(|| Hypothesis::table_from(&loaded.train));
            Arc::new(PlantedLearner::new(target, gamma, cfg.vc_dim.unwrap_or_else(|| stump_vc_dim(dim)))?)
        }
    })
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize)]
struct TrainMetrics {
    schema: u32,
    learner: String,
    n: usize,
    dim: usize,
    k: usize,
    m: usize,
    gamma: f64,
    alpha: f64,
    train_error: f64,
    min_margin: f64,
    test_error: Option<f64>,
    violations: usize,
    model_sha256: String,
}

fn train(c: &TrainConfig, out: &Path) -> CliResult<()> {
    let loaded = load(&c.data)?;
    let learner = make_learner(&c.learner, &loaded, c.boost.gamma)?;
    let (vc, trace) = sampled_boost(&loaded.train, learner.as_ref(), &c.boost)?;
    let model = vc.to_json();
    write_file(out, "model.json", model.as_bytes())?;
    write_file(out, "trace.ndjson", trace.to_ndjson().as_bytes())?;
    let metrics = TrainMetrics {
        schema: SCHEMA_VERSION,
        learner: learner.name().to_string(),
        n: loaded.train.len(),
        dim: loaded.train.dim(),
        k: trace.header.k,
        m: trace.header.m,
        gamma: c.boost.gamma,
        alpha: trace.alpha(),
        train_error: vc.training_error(&loaded.train),
        min_margin: vc.min_margin(&loaded.train),
        test_error: loaded.test.as_ref().map(|t| vc.training_error(t)),
        violations: trace.violations(),
        model_sha256: sha256_hex(model.as_bytes()),
    };
    write_json(out, "metrics.json", &metrics)
}

#[derive(Serialize)]
struct TraceAudit {
    schema: u32,
    n: usize,
    k: usize,
    m: usize,
    gamma: f64,
    telescoping_residual: Option<f64>,
    zk_deviation: Option<f64>,
    telescoping_tolerance: f64,
    zk_tolerance: f64,
    min_margin: Option<f64>,
    train_error: Option<f64>,
    violations: usize,
    identities_pass: bool,
    error: Option<String>,
}

fn audit(c: &AuditConfig, out: &Path) -> CliResult<()> {
    match c {
        AuditConfig::Trace { trace, data } => audit_trace(trace, data, out),
        AuditConfig::Fresh { data, learner, boost, seeds } => {
            let loaded = load(data)?;
            let learner = make_learner(learner, &loaded, boost.gamma)?;
            let report = margin_audit(&loaded.train, learner.as_ref(), boost, *seeds)?;
            write_json(out, "audit.json", &report)?;
            if !report.identities_pass {
                return Err(CliError::new(
                    EXIT_CHECK,
                    format!(
                        "identity check failed: telescoping residual {:e}, Z_k deviation {:e}",
                        report.max_telescoping_residual, report.max_zk_deviation
                    ),
                ));
            }
            Ok(())
        }
    }
}

fn audit_trace(path: &Path, data: &DataSource, out: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    let loaded = load(data)?;
    let trace = match BoostTrace::from_ndjson(&text) {
        Ok(t) => t,
        Err(e) => return Err(CliError::new(EXIT_CHECK, format!("corrupt trace {}: {e}", path.display()))),
    };
    if trace.header.dataset_digest != loaded.train.digest() {
        return Err(CliError::config("the trace was not recorded on this dataset"));
    }
    let checks = telescoping_check(&trace, &loaded.train).and_then(|t| Ok((t, zk_check(&trace, &loaded.train)?)));
    let vc = trace.classifier()?;
    let (residual, zk, error) = match checks {
        Ok((t, z)) => (Some(t), Some(z), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let pass = residual.is_some_and(|t| t <= TELESCOPING_TOLERANCE) && zk.is_some_and(|z| z <= ZK_TOLERANCE);
    let report = TraceAudit {
        schema: SCHEMA_VERSION,
        n: trace.header.n,
        k: trace.header.k,
        m: trace.header.m,
        gamma: trace.header.gamma,
        telescoping_residual: residual,
        zk_deviation: zk,
        telescoping_tolerance: TELESCOPING_TOLERANCE,
        zk_tolerance: ZK_TOLERANCE,
        min_margin: Some(vc.min_margin(&loaded.train)),
        train_error: Some(vc.training_error(&loaded.train)),
        violations: trace.violations(),
        identities_pass: pass,
        error,
    };
    write_json(out, "audit.json", &report)?;
    if !pass {
        return Err(CliError::new(
            EXIT_CHECK,
            format!("identity check failed: telescoping residual {residual:?}, Z_k deviation {zk:?}"),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
struct StabilitySummary {
    schema: u32,
    suite: String,
    instances: Vec<(String, Verdict)>,
    warnings: Vec<String>,
    pass: bool,
}

fn stability(c: &StabilityConfig, out: &Path) -> CliResult<()> {
    let instances = suite(&c.suite)?;
    let mut summary =
        StabilitySummary { schema: SCHEMA_VERSION, suite: c.suite.clone(), instances: Vec::new(), warnings: Vec::new(), pass: true };
    for inst in &instances {
        let report = stability_test(inst, &c.options)?;
        write_json(out, &format!("stability-{}.json", inst.name), &report)?;
        if let Some(w) = &report.warning {
            summary.warnings.push(format!("{}: {w}", inst.name));
        }
        summary.pass &= report.verdict != Verdict::Fail;
        summary.instances.push((inst.name.clone(), report.verdict));
    }
    write_json(out, "stability.json", &summary)?;
    for w in &summary.warnings {
        eprintln!("warning: {w}");
    }
    if !summary.pass {
        let failed: Vec<&str> =
            summary.instances.iter().filter(|(_, v)| *v == Verdict::Fail).map(|(n, _)| n.as_str()).collect();
        return Err(CliError::new(EXIT_CHECK, format!("stability rejected for {}", failed.join(", "))));
    }
    Ok(())
}

fn sweep(c: &SweepConfig, out: &Path) -> CliResult<()> {
    let curve = learning_curve(&c.options, &c.algorithms, &c.grid, c.trials)?;
    let report = compare_report(&curve, c.bound_constant)?;
    write_file(out, "points.csv", points_to_csv(&curve.points)?.as_bytes())?;
    write_file(out, "report.json", (report.to_json() + "\n").as_bytes())
}

#[derive(Serialize)]
struct CompressCheck {
    schema: u32,
    k: usize,
    m: usize,
    sequence_length: usize,
    compression_size: usize,
    train_points: usize,
    train_mismatches: usize,
    probes: usize,
    probe_mismatches: usize,
    pass: bool,
}

const PROBE_TAG: u64 = 0x7072_6f62_6573;

fn compress_check(c: &CompressConfig, out: &Path) -> CliResult<()> {
    let loaded = load(&c.data)?;
    let learner = make_learner(&c.learner, &loaded, c.boost.gamma)?;
    let (vc, trace) = sampled_boost(&loaded.train, learner.as_ref(), &c.boost)?;
    let seq = encode(&trace, &loaded.train)?;
    write_file(out, "compression.json", seq.to_json().as_bytes())?;
    let rebuilt = reconstruct(&seq, learner.as_ref())?;

    let train = &loaded.train;
    let train_mismatches = train.examples().iter().filter(|e| rebuilt.predict(e.x()) != vc.predict(e.x())).count();
    let mut rng = RngStream::new(c.boost.seed, derive_stream_id(&[c.boost.stream, PROBE_TAG]));
    let bounds: Vec<(f64, f64)> = (0..train.dim())
        .map(|j| {
            let col = train.examples().iter().map(|e| e.x()[j]);
            let lo = col.clone().fold(f64::INFINITY, f64::min);
            let hi = col.fold(f64::NEG_INFINITY, f64::max);
            (lo - 1.0, hi + 1.0)
        })
        .collect();
    let probe_mismatches = (0..c.probes)
        .filter(|_| {
            let x: Vec<f64> = bounds.iter().map(|&(lo, hi)| rng.uniform(lo, hi)).collect();
            rebuilt.predict(&x) != vc.predict(&x)
        })
        .count();
    let pass = train_mismatches == 0 && probe_mismatches == 0;
    let report = CompressCheck {
        schema: SCHEMA_VERSION,
        k: seq.k,
        m: seq.m,
        sequence_length: seq.len(),
        compression_size: compression_size(&seq),
        train_points: train.len(),
        train_mismatches,
        probes: c.probes,
        probe_mismatches,
        pass,
    };
    write_json(out, "compress-check.json", &report)?;
    if !pass {
        return Err(CliError::new(
            EXIT_CHECK,
            format!("reconstruction differs on {train_mismatches} training points and {probe_mismatches} probes"),
        ));
    }
    Ok(())
}
