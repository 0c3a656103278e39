//! Seeded synthetic cases inside overlap and pure areas, and the evaluation
//! measures computed on them.

use std::collections::BTreeSet;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::overlap::{Hyperblock, OverlapInterval};
use crate::scorers::{LinearScorer, OverlapWeights};
use crate::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthMode {
    /// Independent uniform draw on each side of the box.
    UniformHb,
    /// Normal around the box centre, sigma = side / 6, clipped to the box.
    GaussianCenter,
    /// Each attribute drawn from the observed values of the area's members.
    MarginalPure,
}

impl SynthMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SynthMode::UniformHb => "uniform_hb",
            SynthMode::GaussianCenter => "gaussian_center",
            SynthMode::MarginalPure => "marginal_pure",
        }
    }
}

impl std::str::FromStr for SynthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform_hb" => Ok(SynthMode::UniformHb),
            "gaussian_center" => Ok(SynthMode::GaussianCenter),
            "marginal_pure" => Ok(SynthMode::MarginalPure),
            other => Err(Error::InvalidInput(format!("unknown synthetic mode `{other}`"))),
        }
    }
}

/// Area to sample from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Hyperblock(Hyperblock),
    PureArea { class: ClassLabel, members: Vec<Vec<f64>>, lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    /// Pure area spanned by the listed cases of `d`.
    pub fn pure_area(d: &Dataset, class: ClassLabel, ids: &BTreeSet<CaseId>) -> Result<Region> {
        if ids.is_empty() {
            return Err(Error::InvalidInput("pure area needs at least one member".into()));
        }
        let members: Vec<Vec<f64>> = d.select(ids)?.cases().to_vec();
        let n = d.n_attributes();
        let lo = (0..n).map(|i| members.iter().map(|m| m[i]).fold(f64::INFINITY, f64::min)).collect();
        let hi = (0..n).map(|i| members.iter().map(|m| m[i]).fold(f64::NEG_INFINITY, f64::max)).collect();
        Ok(Region::PureArea { class, members, lo, hi })
    }

    pub fn bounds(&self) -> (&[f64], &[f64]) {
        match self {
            Region::Hyperblock(hb) => (&hb.lo, &hb.hi),
            Region::PureArea { lo, hi, .. } => (lo, hi),
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("region serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticBatch {
    pub mode: SynthMode,
    pub seed: u64,
    pub region_hash: String,
    pub cases: Vec<Vec<f64>>,
    /// The region has zero extent; every case is the same point.
    pub degenerate: bool,
}

impl SyntheticBatch {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    /// CSV with a provenance comment line ahead of the header.
    pub fn write_csv<W: Write>(&self, attributes: &[String], mut sink: W) -> Result<()> {
        writeln!(sink, "# mode={} seed={} region={}", self.mode.as_str(), self.seed, self.region_hash)?;
        writeln!(sink, "{}", attributes.join(","))?;
        for c in &self.cases {
            let row: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(sink, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Draws `n` cases from `region`. The same inputs always give the same batch.
pub fn generate_synthetic(region: &Region, n: usize, mode: SynthMode, seed: u64) -> Result<SyntheticBatch> {
    let (lo, hi) = region.bounds();
    if lo.len() != hi.len() {
        return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
    }
    let degenerate = lo.iter().zip(hi).all(|(l, h)| l == h);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<Vec<f64>> = match (mode, region) {
        (SynthMode::MarginalPure, Region::Hyperblock(_)) => {
            return Err(Error::InvalidInput("marginal_pure needs a pure area with members".into()))
        }
        _ if degenerate => vec![lo.to_vec(); n],
        (SynthMode::UniformHb, _) => (0..n)
            .map(|_| lo.iter().zip(hi).map(|(&l, &h)| if l == h { l } else { rng.random_range(l..=h) }).collect())
            .collect(),
        (SynthMode::GaussianCenter, _) => (0..n)
            .map(|_| {
                lo.iter()
                    .zip(hi)
                    .map(|(&l, &h)| {
                        if l == h {
                            return l;
                        }
                        let normal = Normal::new((l + h) / 2.0, (h - l) / 6.0).expect("positive sigma");
                        normal.sample(&mut rng).clamp(l, h)
                    })
                    .collect()
            })
            .collect(),
        (SynthMode::MarginalPure, Region::PureArea { members, .. }) => {
            (0..n).map(|_| (0..lo.len()).map(|i| members[rng.random_range(0..members.len())][i]).collect()).collect()
        }
    };
    Ok(SyntheticBatch { mode, seed, region_hash: region.content_hash(), cases, degenerate })
}

/// Rows are true labels, columns predicted labels, plus an abstention column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<ClassLabel>,
    pub counts: Vec<Vec<usize>>,
    pub abstained: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    /// Cases evaluated.
    pub n_ov: usize,
    /// Wrong or abstained predictions.
    pub n_mis: usize,
    pub e_ovl: f64,
    pub a_ovl: f64,
    pub confusion: ConfusionMatrix,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_accuracy: Option<f64>,
    /// Share of evaluated cases whose original score lies in the overlap interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overlap_hit_fraction: Option<f64>,
}

/// Error and accuracy of `model` on the labelled overlap cases `d_eval`.
pub fn evaluate_overlap(
    model: &dyn Classifier,
    d_eval: &Dataset,
    formerly_mis: Option<(&BTreeSet<CaseId>, OverlapWeights)>,
) -> Result<EvalReport> {
    if d_eval.is_empty() {
        return Err(Error::InvalidInput("evaluation set is empty".into()));
    }
    let predictions: Vec<Option<ClassLabel>> = d_eval.cases().iter().map(|c| model.predict(c)).collect();
    let mut labels = d_eval.classes();
    for p in predictions.iter().flatten() {
        if !labels.contains(p) {
            labels.push(p.clone());
        }
    }
    let pos = |l: &ClassLabel| labels.iter().position(|x| x == l).unwrap();
    let mut counts = vec![vec![0usize; labels.len()]; labels.len()];
    let mut abstained = vec![0usize; labels.len()];
    let mut n_mis = 0;
    for (truth, pred) in d_eval.labels().iter().zip(&predictions) {
        match pred {
            Some(p) => {
                counts[pos(truth)][pos(p)] += 1;
                if p != truth {
                    n_mis += 1;
                }
            }
            None => {
                abstained[pos(truth)] += 1;
                n_mis += 1;
            }
        }
    }
    let n_ov = d_eval.len();
    let e_ovl = n_mis as f64 / n_ov as f64;
    let weighted_accuracy = match formerly_mis {
        Some((mis, w)) => {
            w.validate()?;
            Some(crate::scorers::weighted_accuracy(model, d_eval, mis, w))
        }
        None => None,
    };
    Ok(EvalReport {
        n_ov,
        n_mis,
        e_ovl,
        a_ovl: 1.0 - e_ovl,
        confusion: ConfusionMatrix { labels, counts, abstained },
        weighted_accuracy,
        overlap_hit_fraction: None,
    })
}

impl EvalReport {
    pub fn with_overlap_hits(mut self, d_eval: &Dataset, f1: &LinearScorer, interval: &OverlapInterval) -> Self {
        let hits = d_eval.cases().iter().filter(|c| interval.contains(f1.score(c))).count();
        self.overlap_hit_fraction = Some(hits as f64 / d_eval.len().max(1) as f64);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PureAreaVerdict {
    /// No synthetic pure-area case lands in the overlap interval.
    PureEvidence,
    /// Some do; the overlap-area model should also be trained on the pure area.
    BoostBothAreas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureAreaEvidence {
    pub considered: usize,
    pub excluded_inside_hb: usize,
    pub inside_interval: usize,
    pub fraction: f64,
    pub verdict: PureAreaVerdict,
    /// Synthetic fraction over the real fraction, when a nonzero real one is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy_ratio: Option<f64>,
}

/// Scores a pure-area batch with the original scorer and counts how many
/// land in `[a, b]`. Cases inside the overlap hyperblock are left out.
pub fn pure_area_evidence(
    batch: &SyntheticBatch,
    f1: &LinearScorer,
    interval: &OverlapInterval,
    overlap_hb: Option<&Hyperblock>,
    real_fraction: Option<f64>,
) -> Result<PureAreaEvidence> {
    let mut excluded_inside_hb = 0;
    let mut considered = 0;
    let mut inside_interval = 0;
    for c in &batch.cases {
        if c.len() != f1.coefficients.len() {
            return Err(Error::DimensionMismatch { expected: f1.coefficients.len(), found: c.len() });
        }
        if overlap_hb.is_some_and(|hb| hb.contains(c)) {
            excluded_inside_hb += 1;
            continue;
        }
        considered += 1;
        if interval.contains(f1.score(c)) {
            inside_interval += 1;
        }
    }
    if considered == 0 {
        return Err(Error::InvalidInput("no synthetic case left outside the overlap hyperblock".into()));
    }
    let fraction = inside_interval as f64 / considered as f64;
    Ok(PureAreaEvidence {
        considered,
        excluded_inside_hb,
        inside_interval,
        fraction,
        verdict: if inside_interval == 0 { PureAreaVerdict::PureEvidence } else { PureAreaVerdict::BoostBothAreas },
        discrepancy_ratio: real_fraction.filter(|r| *r > 0.0).map(|r| fraction / r),
    })
}
