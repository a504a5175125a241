use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::curve::{Algorithm, Curve, CurveOptions, CurvePoint};
use crate::compress::sample_complexity_bound;
use crate::stats::{median, quantile};
use crate::weak::stump_vc_dim;
use crate::{Error, Result, SCHEMA_VERSION};

/// JSON Schema of [`CompareReport`].
pub const COMPARE_REPORT_SCHEMA: &str = include_str!("../../schema/compare-report.schema.json");

/// Summary of one `(algorithm, n)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub algorithm: Algorithm,
    pub n: usize,
    pub trials: usize,
    pub failures: usize,
    pub median_test_error: Option<f64>,
    pub iqr_test_error: Option<f64>,
    pub median_test_error_se: Option<f64>,
    pub median_train_error: Option<f64>,
    pub iqr_train_error: Option<f64>,
    pub median_min_margin: Option<f64>,
    pub fraction_zero_train_error: Option<f64>,
    /// Sample-complexity bound at this `n` for the configured constant;
    /// absent when `n` does not exceed the VC dimension.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub schema: u32,
    pub options: CurveOptions,
    pub gamma: f64,
    pub bound_constant: f64,
    pub series: Vec<Series>,
    /// SHA-256 over the options, the points without wall times and the
    /// series.
    pub determinism_hash: String,
}

fn median_iqr(values: &[f64]) -> (Option<f64>, Option<f64>) {
    let iqr = quantile(values, 0.75).zip(quantile(values, 0.25)).map(|(hi, lo)| hi - lo);
    (median(values), iqr)
}

fn summarize(alg: Algorithm, n: usize, points: &[&CurvePoint], curve: &Curve, c: f64) -> Series {
    let ok: Vec<&CurvePoint> = points.iter().copied().filter(|p| p.failure.is_none()).collect();
    let collect = |f: fn(&CurvePoint) -> Option<f64>| ok.iter().filter_map(|p| f(p)).collect::<Vec<f64>>();
    let test = collect(|p| p.test_error);
    let train = collect(|p| p.train_error);
    let (median_test_error, iqr_test_error) = median_iqr(&test);
    let (median_train_error, iqr_train_error) = median_iqr(&train);
    let d = stump_vc_dim(curve.options.dim);
    Series {
        algorithm: alg,
        n,
        trials: points.len(),
        failures: points.len() - ok.len(),
        median_test_error,
        iqr_test_error,
        median_test_error_se: median(&collect(|p| p.test_error_se)),
        median_train_error,
        iqr_train_error,
        median_min_margin: median(&collect(|p| p.min_margin)),
        fraction_zero_train_error: (!train.is_empty())
            .then(|| train.iter().filter(|&&e| e == 0.0).count() as f64 / train.len() as f64),
        bound: sample_complexity_bound(curve.gamma, d, n, curve.options.delta, c).ok().map(|b| b.value),
    }
}

/// Medians and interquartile ranges per `(algorithm, n)` with the bound
/// overlay for constant `c`.
pub fn compare_report(curve: &Curve, c: f64) -> Result<CompareReport> {
    if curve.points.is_empty() {
        return Err(Error::invalid("no curve points to report"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("bound constant {c} is not positive")));
    }
    let mut cells: BTreeMap<(Algorithm, usize), Vec<&CurvePoint>> = BTreeMap::new();
    for p in &curve.points {
        cells.entry((p.algorithm, p.n)).or_default().push(p);
    }
    let series: Vec<Series> = cells.iter().map(|(&(alg, n), ps)| summarize(alg, n, ps, curve, c)).collect();
    let determinism_hash = determinism_hash(curve, c, &series)?;
    Ok(CompareReport { schema: SCHEMA_VERSION, options: curve.options.clone(), gamma: curve.gamma, bound_constant: c, series, determinism_hash })
}

fn determinism_hash(curve: &Curve, c: f64, series: &[Series]) -> Result<String> {
    let points: Vec<CurvePoint> = curve.points.iter().map(|p| CurvePoint { wall_time_ms: 0.0, ..p.clone() }).collect();
    let body = serde_json::to_vec(&(&curve.options, curve.gamma.to_bits(), c.to_bits(), &points, series))?;
    Ok(hex::encode(Sha256::digest(&body)))
}

impl CompareReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn series_for(&self, alg: Algorithm) -> impl Iterator<Item = &Series> {
        self.series.iter().filter(move |s| s.algorithm == alg)
    }
}

/// Flat CSV of curve points, one row per point.
pub fn points_to_csv(points: &[CurvePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "algorithm",
        "n",
        "trial",
        "train_error",
        "test_error",
        "test_error_se",
        "min_margin",
        "rounds",
        "wall_time_ms",
        "failure",
    ])
    .map_err(csv_err)?;
    let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
    for p in points {
        w.write_record([
            p.algorithm.name().to_string(),
            p.n.to_string(),
            p.trial.to_string(),
            opt(p.train_error),
            opt(p.test_error),
            opt(p.test_error_se),
            opt(p.min_margin),
            p.rounds.map(|r| r.to_string()).unwrap_or_default(),
            p.wall_time_ms.to_string(),
            p.failure.clone().unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::invalid(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::invalid(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::invalid(format!("csv export: {e}"))
}
