use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dataset::{cmp_features, Dataset};
use crate::hexfloat;
use crate::{Error, Result};

/// Axis-aligned threshold classifier: predicts `orientation` when
/// `x[feature] > threshold` and `-orientation` otherwise. Infinite
/// thresholds give the two constant classifiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stump {
    pub feature: usize,
    #[serde(with = "hexfloat::scalar")]
    pub threshold: f64,
    pub orientation: i8,
}

impl Stump {
    #[inline]
    pub fn predict(&self, x: &[f64]) -> i8 {
        if x[self.feature] > self.threshold {
            self.orientation
        } else {
            -self.orientation
        }
    }
}

/// Half-open interval `[lo, hi)` on one feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    #[serde(with = "hexfloat::scalar")]
    pub lo: f64,
    #[serde(with = "hexfloat::scalar")]
    pub hi: f64,
}

/// A labelled point of a lookup-table concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    #[serde(with = "hexfloat::vec")]
    pub x: Vec<f64>,
    pub y: i8,
}

/// A serializable classifier `x -> {-1, +1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hypothesis {
    Stump(Stump),
    /// `+1` on the union of the intervals of `feature`, `-1` elsewhere.
    Intervals { feature: usize, intervals: Vec<Interval> },
    /// Lookup table sorted by feature vector; `default` off the table.
    Table { entries: Vec<TableEntry>, default: i8 },
    /// `base` with its prediction negated on the listed points (sorted).
    Planted {
        base: Arc<Hypothesis>,
        #[serde(with = "vec_of_points")]
        flipped: Vec<Vec<f64>>,
    },
}

impl Hypothesis {
    pub fn stump(feature: usize, threshold: f64, orientation: i8) -> Self {
        Hypothesis::Stump(Stump { feature, threshold, orientation })
    }

    /// Concept that labels every example of `data` with its own label.
    pub fn table_from(data: &Dataset) -> Self {
        let mut entries: Vec<TableEntry> = data
            .examples()
            .iter()
            .map(|e| TableEntry { x: e.x().to_vec(), y: e.y() })
            .collect();
        entries.sort_by(|a, b| cmp_features(&a.x, &b.x));
        Hypothesis::Table { entries, default: 1 }
    }

    pub fn planted(base: Arc<Hypothesis>, mut flipped: Vec<Vec<f64>>) -> Self {
        flipped.sort_by(|a, b| cmp_features(a, b));
        flipped.dedup_by(|a, b| cmp_features(a, b).is_eq());
        Hypothesis::Planted { base, flipped }
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        match self {
            Hypothesis::Stump(s) => s.predict(x),
            Hypothesis::Intervals { feature, intervals } => {
                let v = x[*feature];
                if intervals.iter().any(|iv| iv.lo <= v && v < iv.hi) {
                    1
                } else {
                    -1
                }
            }
            Hypothesis::Table { entries, default } => {
                match entries.binary_search_by(|e| cmp_features(&e.x, x)) {
                    Ok(i) => entries[i].y,
                    Err(_) => *default,
                }
            }
            Hypothesis::Planted { base, flipped } => {
                let p = base.predict(x);
                if flipped.binary_search_by(|f| cmp_features(f, x)).is_ok() {
                    -p
                } else {
                    p
                }
            }
        }
    }

    /// Smallest input dimension this hypothesis can be evaluated on.
    pub fn min_dim(&self) -> usize {
        match self {
            Hypothesis::Stump(s) => s.feature + 1,
            Hypothesis::Intervals { feature, .. } => feature + 1,
            Hypothesis::Table { entries, .. } => entries.iter().map(|e| e.x.len()).max().unwrap_or(0),
            Hypothesis::Planted { base, flipped } => {
                base.min_dim().max(flipped.iter().map(Vec::len).max().unwrap_or(0))
            }
        }
    }

    /// Checks invariants a deserialized value may break.
    pub fn validate(&self) -> Result<()> {
        let label = |y: i8| {
            if y == 1 || y == -1 {
                Ok(())
            } else {
                Err(Error::parse(format!("label {y} is not -1 or +1")))
            }
        };
        match self {
            Hypothesis::Stump(s) => {
                label(s.orientation)?;
                if s.threshold.is_nan() {
                    return Err(Error::parse("NaN threshold"));
                }
            }
            Hypothesis::Intervals { intervals, .. } => {
                if intervals.iter().any(|iv| iv.lo.is_nan() || iv.hi.is_nan()) {
                    return Err(Error::parse("NaN interval bound"));
                }
            }
            Hypothesis::Table { entries, default } => {
                label(*default)?;
                for e in entries {
                    label(e.y)?;
                    if e.x.iter().any(|v| v.is_nan()) {
                        return Err(Error::parse("NaN table point"));
                    }
                }
                if entries.windows(2).any(|w| !cmp_features(&w[0].x, &w[1].x).is_lt()) {
                    return Err(Error::parse("table entries are not strictly sorted"));
                }
            }
            Hypothesis::Planted { base, flipped } => {
                base.validate()?;
                if flipped.iter().flatten().any(|v| v.is_nan()) {
                    return Err(Error::parse("NaN flipped point"));
                }
                if flipped.windows(2).any(|w| !cmp_features(&w[0], &w[1]).is_lt()) {
                    return Err(Error::parse("flipped points are not strictly sorted"));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("hypotheses always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let h: Hypothesis = serde_json::from_str(text)?;
        h.validate()?;
        Ok(h)
    }
}

mod vec_of_points {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::hexfloat::HexF64;

    pub fn serialize<S: Serializer>(v: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let wrapped: Vec<Vec<HexF64>> = v.iter().map(|p| p.iter().copied().map(HexF64).collect()).collect();
        wrapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<f64>>, D::Error> {
        let raw = Vec::<Vec<HexF64>>::deserialize(d)?;
        Ok(raw.into_iter().map(|p| p.into_iter().map(|h| h.0).collect()).collect())
    }
}
