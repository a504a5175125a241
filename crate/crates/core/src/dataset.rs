//! Labelled examples and duplicate-free datasets.
//!
//! CSV format: a header row, one decimal column per feature, and a final
//! column named `label`. Labels are `-1`/`+1`; files labelled `0`/`1` are
//! accepted with `0` mapped to `-1`, but a file may not mix `0` and `-1`.
//! NaN and infinite features are rejected.

use std::collections::HashMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::hexfloat;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    #[serde(with = "hexfloat::vec")]
    x: Vec<f64>,
    y: i8,
}

impl LabeledExample {
    pub fn new(x: Vec<f64>, y: i8) -> Result<Self> {
        if y != 1 && y != -1 {
            return Err(Error::Dataset(format!("label {y} is not -1 or +1")));
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!("non-finite feature value {v}")));
        }
        Ok(LabeledExample { x, y })
    }

    #[inline]
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    #[inline]
    pub fn y(&self) -> i8 {
        self.y
    }

    /// Identity of the labelled example as a hashable value. `-0.0` and
    /// `0.0` map to the same key.
    pub fn key(&self) -> ExampleKey {
        ExampleKey {
            x: feature_key(&self.x),
            y: self.y,
        }
    }

    /// Checks the invariants after deserialization.
    pub(crate) fn validate(&self) -> Result<()> {
        LabeledExample::new(self.x.clone(), self.y).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExampleKey {
    x: Vec<u64>,
    y: i8,
}

pub(crate) fn canonical_bits(v: f64) -> u64 {
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

pub(crate) fn feature_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|&v| canonical_bits(v)).collect()
}

/// Total order on feature vectors used for sorted lookups.
pub(crate) fn cmp_features(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (canon(*x), canon(*y));
        match x.total_cmp(&y) {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

fn canon(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// Non-empty sequence of labelled examples with a common dimension and no
/// two examples sharing the same feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    dim: usize,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>) -> Result<Self> {
        let first = examples
            .first()
            .ok_or_else(|| Error::Dataset("dataset is empty".into()))?;
        let dim = first.x.len();
        if dim == 0 {
            return Err(Error::Dataset("feature dimension is zero".into()));
        }
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(examples.len());
        for (i, ex) in examples.iter().enumerate() {
            if ex.x.len() != dim {
                return Err(Error::Dataset(format!(
                    "example {i} has dimension {} but the dataset has {dim}",
                    ex.x.len()
                )));
            }
            if let Some(j) = seen.insert(feature_key(&ex.x), i) {
                return Err(Error::Dataset(format!(
                    "duplicate feature vector {:?} at examples {j} and {i}",
                    ex.x
                )));
            }
        }
        Ok(Dataset { examples, dim })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Vec<f64>, i8)>) -> Result<Self> {
        let examples = pairs
            .into_iter()
            .map(|(x, y)| LabeledExample::new(x, y))
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(examples)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn get(&self, i: usize) -> Option<&LabeledExample> {
        self.examples.get(i)
    }

    /// The examples at `indices`, in that order.
    pub fn subsequence(&self, indices: &[usize]) -> Result<Dataset> {
        let picked = indices
            .iter()
            .map(|&i| {
                self.examples
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("index {i} out of range for n={}", self.len())))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(picked)
    }

    /// Position of every example keyed by identity.
    pub fn index_map(&self) -> HashMap<ExampleKey, usize> {
        self.examples.iter().enumerate().map(|(i, e)| (e.key(), i)).collect()
    }

    /// SHA-256 over the hex-float rendering of every example.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for ex in &self.examples {
            for &v in &ex.x {
                h.update(canonical_bits(v).to_le_bytes());
            }
            h.update([ex.y as u8]);
        }
        hex::encode(h.finalize())
    }

    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(csv_err)?.clone();
        if headers.len() < 2 {
            return Err(Error::Dataset("need at least one feature column and a label column".into()));
        }
        if &headers[headers.len() - 1] != "label" {
            return Err(Error::Dataset(format!(
                "last column must be named `label`, found `{}`",
                &headers[headers.len() - 1]
            )));
        }
        let dim = headers.len() - 1;
        let mut rows: Vec<(Vec<f64>, i8)> = Vec::new();
        let (mut saw_zero, mut saw_neg) = (false, false);
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let row = line + 2;
            if rec.len() != dim + 1 {
                return Err(Error::Dataset(format!("row {row}: expected {} fields, got {}", dim + 1, rec.len())));
            }
            let mut x = Vec::with_capacity(dim);
            for field in rec.iter().take(dim) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Dataset(format!("row {row}: `{field}` is not a number")))?;
                if !v.is_finite() {
                    return Err(Error::Dataset(format!("row {row}: non-finite feature `{field}`")));
                }
                x.push(v);
            }
            let raw = &rec[dim];
            let lv: f64 = raw
                .parse()
                .map_err(|_| Error::Dataset(format!("row {row}: label `{raw}` is not a number")))?;
            let y = if lv == 1.0 {
                1
            } else if lv == -1.0 {
                saw_neg = true;
                -1
            } else if lv == 0.0 {
                saw_zero = true;
                -1
            } else {
                return Err(Error::Dataset(format!("row {row}: label `{raw}` not in {{-1, +1}} or {{0, 1}}")));
            };
            rows.push((x, y));
        }
        if saw_zero && saw_neg {
            return Err(Error::Dataset("labels mix the {0,1} and {-1,+1} conventions".into()));
        }
        Dataset::from_pairs(rows)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        Dataset::from_csv_reader(text.as_bytes())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.dim {
            out.push_str(&format!("x{j},"));
        }
        out.push_str("label\n");
        for ex in &self.examples {
            for &v in &ex.x {
                // shortest representation that parses back to the same bits
                out.push_str(&format!("{v:?},"));
            }
            out.push_str(if ex.y > 0 { "1\n" } else { "-1\n" });
        }
        out
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Dataset(format!("csv: {e}"))
}
