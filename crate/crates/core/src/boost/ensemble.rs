use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, LabeledExample};
use crate::hexfloat;
use crate::weak::Hypothesis;
use crate::{Error, Result, SCHEMA_VERSION};

/// A voting classifier `x -> sign(f(x))` with `f` normalized to `[-1, 1]`.
pub trait Ensemble {
    /// `sum alpha_t h_t(x) / sum |alpha_t|`.
    fn score(&self, x: &[f64]) -> f64;

    /// `sign(score)`, with `sign(0) = +1`.
    fn predict(&self, x: &[f64]) -> i8 {
        if self.score(x) >= 0.0 {
            1
        } else {
            -1
        }
    }

    fn training_error(&self, data: &Dataset) -> f64 {
        let wrong = data.examples().iter().filter(|e| self.predict(e.x()) != e.y()).count();
        wrong as f64 / data.len() as f64
    }

    fn min_margin(&self, data: &Dataset) -> f64 {
        data.examples().iter().map(|e| margin(self, e)).fold(f64::INFINITY, f64::min)
    }
}

/// `y f(x)`, in `[-1, 1]`.
pub fn margin<E: Ensemble + ?Sized>(vc: &E, example: &LabeledExample) -> f64 {
    f64::from(example.y()) * vc.score(example.x())
}

/// Uniform vote `f(x) = (1/K) sum_k h_k(x)` as produced by sampled boosting.
#[derive(Debug, Clone, PartialEq)]
pub struct VotingClassifier {
    hypotheses: Vec<Hypothesis>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UniformDoc<H> {
    schema: u32,
    kind: String,
    hypotheses: H,
}

const UNIFORM_KIND: &str = "uniform_vote";
const WEIGHTED_KIND: &str = "weighted_vote";

impl VotingClassifier {
    pub fn new(hypotheses: Vec<Hypothesis>) -> Result<Self> {
        if hypotheses.is_empty() {
            return Err(Error::invalid("a voting classifier needs at least one hypothesis"));
        }
        Ok(VotingClassifier { hypotheses })
    }

    pub fn hypotheses(&self) -> &[Hypothesis] {
        &self.hypotheses
    }

    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }

    /// Integer vote `sum_k h_k(x)`; the sign decision is taken on this value
    /// so that equal ensembles predict identically.
    pub fn votes(&self, x: &[f64]) -> i64 {
        self.hypotheses.iter().map(|h| i64::from(h.predict(x))).sum()
    }

    pub fn to_json(&self) -> String {
        let doc = UniformDoc { schema: SCHEMA_VERSION, kind: UNIFORM_KIND.to_string(), hypotheses: &self.hypotheses };
        serde_json::to_string(&doc).expect("classifiers always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: UniformDoc<Vec<Hypothesis>> = serde_json::from_str(text)?;
        check_header(doc.schema, &doc.kind, UNIFORM_KIND)?;
        for h in &doc.hypotheses {
            h.validate()?;
        }
        VotingClassifier::new(doc.hypotheses).map_err(|e| Error::parse(e.to_string()))
    }
}

impl Ensemble for VotingClassifier {
    fn score(&self, x: &[f64]) -> f64 {
        self.votes(x) as f64 / self.hypotheses.len() as f64
    }

    fn predict(&self, x: &[f64]) -> i8 {
        if self.votes(x) >= 0 {
            1
        } else {
            -1
        }
    }
}

fn check_header(schema: u32, kind: &str, expected: &str) -> Result<()> {
    if schema != SCHEMA_VERSION {
        return Err(Error::parse(format!("unsupported schema version {schema}")));
    }
    if kind != expected {
        return Err(Error::parse(format!("expected a {expected} model, found {kind}")));
    }
    Ok(())
}

/// One term `alpha h` of a weighted vote.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedTerm {
    #[serde(with = "hexfloat::scalar")]
    pub alpha: f64,
    pub hypothesis: Hypothesis,
}

/// Weighted vote `sign(sum alpha_t h_t(x))` as produced by AdaBoost.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVotingClassifier {
    terms: Vec<WeightedTerm>,
    mass: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightedDoc<T> {
    schema: u32,
    kind: String,
    terms: T,
}

impl WeightedVotingClassifier {
    /// Coefficients must be finite and not all zero.
    pub fn new(terms: Vec<WeightedTerm>) -> Result<Self> {
        if terms.iter().any(|t| !t.alpha.is_finite()) {
            return Err(Error::invalid("non-finite vote coefficient"));
        }
        let mass: f64 = terms.iter().map(|t| t.alpha.abs()).sum();
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::invalid("vote coefficients have no mass"));
        }
        Ok(WeightedVotingClassifier { terms, mass })
    }

    pub fn terms(&self) -> &[WeightedTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_json(&self) -> String {
        let doc = WeightedDoc { schema: SCHEMA_VERSION, kind: WEIGHTED_KIND.to_string(), terms: &self.terms };
        serde_json::to_string(&doc).expect("classifiers always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: WeightedDoc<Vec<WeightedTerm>> = serde_json::from_str(text)?;
        check_header(doc.schema, &doc.kind, WEIGHTED_KIND)?;
        for t in &doc.terms {
            t.hypothesis.validate()?;
        }
        WeightedVotingClassifier::new(doc.terms).map_err(|e| Error::parse(e.to_string()))
    }
}

impl Ensemble for WeightedVotingClassifier {
    fn score(&self, x: &[f64]) -> f64 {
        let s: f64 = self.terms.iter().map(|t| t.alpha * f64::from(t.hypothesis.predict(x))).sum();
        (s / self.mass).clamp(-1.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant(y: i8) -> Hypothesis {
        Hypothesis::stump(0, f64::NEG_INFINITY, y)
    }

    fn uniform(ys: &[i8]) -> VotingClassifier {
        VotingClassifier::new(ys.iter().map(|&y| constant(y)).collect()).unwrap()
    }

    #[test]
    fn margin_examples() {
        let pos = LabeledExample::new(vec![0.0], 1).unwrap();
        assert_eq!(margin(&uniform(&[1, 1, 1]), &pos), 1.0);
        assert_eq!(margin(&uniform(&[1, -1]), &pos), 0.0);
        assert_eq!(margin(&uniform(&[1, 1, 1, -1]), &pos), 0.5);
        let neg = LabeledExample::new(vec![0.0], -1).unwrap();
        assert_eq!(margin(&uniform(&[1, 1, 1, -1]), &neg), -0.5);
    }

    #[test]
    fn ties_predict_positive() {
        assert_eq!(uniform(&[1, -1]).predict(&[0.0]), 1);
        let w = WeightedVotingClassifier::new(vec![
            WeightedTerm { alpha: 0.5, hypothesis: constant(1) },
            WeightedTerm { alpha: 0.5, hypothesis: constant(-1) },
        ])
        .unwrap();
        assert_eq!(w.predict(&[0.0]), 1);
    }

    #[test]
    fn weighted_margin_normalizes_by_mass() {
        let w = WeightedVotingClassifier::new(vec![
            WeightedTerm { alpha: 3.0, hypothesis: constant(1) },
            WeightedTerm { alpha: 1.0, hypothesis: constant(-1) },
        ])
        .unwrap();
        let pos = LabeledExample::new(vec![0.0], 1).unwrap();
        assert_eq!(margin(&w, &pos), 0.5);
    }

    #[test]
    fn json_round_trips() {
        let v = VotingClassifier::new(vec![Hypothesis::stump(0, 0.1, 1), Hypothesis::stump(1, -2.5, -1)]).unwrap();
        assert_eq!(VotingClassifier::from_json(&v.to_json()).unwrap(), v);
        let w = WeightedVotingClassifier::new(vec![WeightedTerm { alpha: 0.549, hypothesis: constant(1) }]).unwrap();
        assert_eq!(WeightedVotingClassifier::from_json(&w.to_json()).unwrap(), w);
        assert!(VotingClassifier::from_json(&w.to_json()).is_err());
        assert!(VotingClassifier::from_json(r#"{"schema":1,"kind":"uniform_vote","hypotheses":[]}"#).is_err());
        assert!(VotingClassifier::from_json(r#"{"schema":9,"kind":"uniform_vote","hypotheses":[]}"#).is_err());
    }
}
