use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::overlap::{find_misclassified, overlap_for_scorer, OverlapInterval};
use crate::scorers::{train_weighted_overlap, LinearScorer, OverlapWeights};
use crate::Classifier;

/// Which scorer decided a case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Outer,
    Overlap,
}

/// `f1` outside the overlap interval `[a, b]` of its scores, `f2` inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub f1: LinearScorer,
    pub f2: LinearScorer,
    pub interval: OverlapInterval,
    /// The interval is empty, so `f2` is never consulted.
    pub f2_unused: bool,
}

pub fn compose_boosted(f1: LinearScorer, f2: LinearScorer, interval: OverlapInterval) -> Result<BoostedModel> {
    if f1.coefficients.len() != f2.coefficients.len() {
        return Err(Error::DimensionMismatch { expected: f1.coefficients.len(), found: f2.coefficients.len() });
    }
    let f2_unused = interval.empty;
    Ok(BoostedModel { f1, f2, interval, f2_unused })
}

/// Finds the overlap of `f1` on `d`, trains the overlap scorer there and
/// composes both. With no misclassified case `f1` is returned unchanged
/// (as an unused `f2`).
pub fn boost(d: &Dataset, f1: LinearScorer, weights: OverlapWeights) -> Result<BoostedModel> {
    let two = d.filter_classes(&[f1.top_class.clone(), f1.bottom_class.clone()]);
    let (scores, interval) = overlap_for_scorer(&two, &f1)?;
    if interval.empty {
        return compose_boosted(f1.clone(), f1, interval);
    }
    let mis = find_misclassified(&scores, two.labels(), &f1.top_class, f1.threshold)?;
    let overlap = two.select(&interval.cases_inside(&scores))?;
    let f2 = train_weighted_overlap(&overlap, &mis, weights, &f1.top_class, &f1.bottom_class, Some(&two))?;
    compose_boosted(f1, f2, interval)
}

impl BoostedModel {
    pub fn route(&self, case: &[f64]) -> Route {
        if self.interval.contains(self.f1.score(case)) {
            Route::Overlap
        } else {
            Route::Outer
        }
    }

    pub fn predict_boosted(&self, case: &[f64]) -> &ClassLabel {
        match self.route(case) {
            Route::Overlap => self.f2.classify(case),
            Route::Outer => self.f1.classify(case),
        }
    }

    /// Parameters of both scorers, or of `f1` alone when `f2` is unused.
    pub fn parameter_count(&self) -> usize {
        if self.f2_unused {
            self.f1.parameter_count()
        } else {
            self.f1.parameter_count() + self.f2.parameter_count()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("boosted model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Classifier for BoostedModel {
    fn predict(&self, case: &[f64]) -> Option<ClassLabel> {
        Some(self.predict_boosted(case).clone())
    }
}
