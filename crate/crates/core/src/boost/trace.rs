use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::VotingClassifier;
use crate::dist::WeightDistribution;
use crate::hexfloat;
use crate::weak::Hypothesis;
use crate::{Error, Result, SCHEMA_VERSION};

/// Run parameters recorded at the top of every trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceHeader {
    pub schema: u32,
    pub n: usize,
    pub dim: usize,
    #[serde(with = "hexfloat::scalar")]
    pub gamma: f64,
    #[serde(with = "hexfloat::scalar")]
    pub delta: f64,
    pub upper_bound_n: u64,
    #[serde(with = "hexfloat::scalar")]
    pub a_const: f64,
    pub m: usize,
    pub k: usize,
    #[serde(with = "hexfloat::scalar")]
    pub alpha: f64,
    pub seed: u64,
    pub stream: u64,
    pub generator: String,
    pub learner: String,
    pub vc_dim: usize,
    pub dataset_digest: String,
}

/// One boosting round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundRecord {
    /// 1-based round number.
    pub k: usize,
    /// Dataset indices of `S_k` in draw order.
    pub subsample: Vec<usize>,
    /// `D_k`, kept only when requested; never written to files.
    #[serde(skip)]
    pub distribution: Option<WeightDistribution>,
    pub hypothesis: Hypothesis,
    /// Normalizer `Z_k`.
    #[serde(with = "hexfloat::scalar")]
    pub z: f64,
    /// Error of `h_k` under `D_k`.
    #[serde(with = "hexfloat::scalar")]
    pub weak_error: f64,
    /// Error of `h_k` on `S_k`.
    #[serde(with = "hexfloat::scalar")]
    pub sample_error: f64,
    /// The learner missed its advantage on `S_k`.
    pub violation: bool,
}

/// Complete record of a sampled-boosting run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostTrace {
    pub header: TraceHeader,
    pub rounds: Vec<RoundRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum Line<H, R> {
    Header(H),
    Round(R),
}

impl BoostTrace {
    pub fn alpha(&self) -> f64 {
        self.header.alpha
    }

    pub fn violations(&self) -> usize {
        self.rounds.iter().filter(|r| r.violation).count()
    }

    /// The voting classifier the trace describes.
    pub fn classifier(&self) -> Result<VotingClassifier> {
        VotingClassifier::new(self.rounds.iter().map(|r| r.hypothesis.clone()).collect())
    }

    /// Structural invariants: `K` rounds numbered in order, `|S_k| = m`,
    /// indices in range, finite positive normalizers, errors in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let h = &self.header;
        if h.schema != SCHEMA_VERSION {
            return Err(Error::parse(format!("unsupported trace schema {}", h.schema)));
        }
        if h.n == 0 || h.m == 0 || h.k == 0 || h.dim == 0 {
            return Err(Error::parse("trace header has an empty dimension"));
        }
        if !(h.alpha.is_finite() && h.alpha > 0.0) {
            return Err(Error::parse("trace alpha is not positive and finite"));
        }
        if self.rounds.len() != h.k {
            return Err(Error::parse(format!("trace declares {} rounds but holds {}", h.k, self.rounds.len())));
        }
        for (i, r) in self.rounds.iter().enumerate() {
            if r.k != i + 1 {
                return Err(Error::parse(format!("round {} recorded as round {}", i + 1, r.k)));
            }
            if r.subsample.len() != h.m {
                return Err(Error::parse(format!("round {} subsample has {} entries, expected {}", r.k, r.subsample.len(), h.m)));
            }
            if let Some(&bad) = r.subsample.iter().find(|&&p| p >= h.n) {
                return Err(Error::parse(format!("round {} index {bad} out of range", r.k)));
            }
            r.hypothesis.validate()?;
            if r.hypothesis.min_dim() > h.dim {
                return Err(Error::parse(format!("round {} hypothesis reads beyond dimension {}", r.k, h.dim)));
            }
            if !(r.z.is_finite() && r.z > 0.0) {
                return Err(Error::parse(format!("round {} normalizer {} is not positive", r.k, r.z)));
            }
            for e in [r.weak_error, r.sample_error] {
                if !(0.0..=1.0).contains(&e) {
                    return Err(Error::parse(format!("round {} error {e} outside [0, 1]", r.k)));
                }
            }
        }
        Ok(())
    }

    pub fn write_ndjson<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer(&mut out, &Line::<_, ()>::Header(&self.header))?;
        out.write_all(b"\n")?;
        for r in &self.rounds {
            serde_json::to_writer(&mut out, &Line::<(), _>::Round(r))?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_ndjson(&self) -> String {
        let mut buf = Vec::new();
        self.write_ndjson(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn read_ndjson<R: BufRead>(input: R) -> Result<Self> {
        let mut header = None;
        let mut rounds = Vec::new();
        for (no, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed: Line<TraceHeader, RoundRecord> =
                serde_json::from_str(&line).map_err(|e| Error::parse(format!("trace line {}: {e}", no + 1)))?;
            match (parsed, header.is_some()) {
                (Line::Header(h), false) => header = Some(h),
                (Line::Header(_), true) => return Err(Error::parse("trace has more than one header")),
                (Line::Round(_), false) => return Err(Error::parse("trace round precedes the header")),
                (Line::Round(r), true) => rounds.push(r),
            }
        }
        let header = header.ok_or_else(|| Error::parse("trace has no header"))?;
        let trace = BoostTrace { header, rounds };
        trace.validate()?;
        Ok(trace)
    }

    pub fn from_ndjson(text: &str) -> Result<Self> {
        Self::read_ndjson(text.as_bytes())
    }
}
