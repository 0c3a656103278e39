//! Single-valued linear scorers `F(x) = k·x` with a threshold `T`:
//! `F(x) > T` assigns the top class, anything else the bottom class.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::Classifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScorerOrigin {
    Fisher,
    ReducedPair,
    WeightedOverlap,
    External,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearScorer {
    pub coefficients: Vec<f64>,
    pub threshold: f64,
    pub top_class: ClassLabel,
    pub bottom_class: ClassLabel,
    pub provenance: ScorerOrigin,
}

impl LinearScorer {
    pub fn score(&self, case: &[f64]) -> f64 {
        self.coefficients.iter().zip(case).map(|(k, x)| k * x).sum()
    }

    /// Strict inequality: a score equal to the threshold goes to the bottom class.
    pub fn decide(&self, score: f64) -> &ClassLabel {
        if score > self.threshold {
            &self.top_class
        } else {
            &self.bottom_class
        }
    }

    pub fn classify(&self, case: &[f64]) -> &ClassLabel {
        self.decide(self.score(case))
    }

    /// Coefficients plus the threshold.
    pub fn parameter_count(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn score_dataset(&self, d: &Dataset) -> Result<ScoreVector> {
        if d.n_attributes() != self.coefficients.len() {
            return Err(Error::DimensionMismatch { expected: self.coefficients.len(), found: d.n_attributes() });
        }
        Ok(ScoreVector {
            case_ids: d.case_ids().to_vec(),
            scores: d.cases().iter().map(|c| self.score(c)).collect(),
            provenance: ScoreProvenance::Trained,
        })
    }

    /// Short content hash used to tie overlap artifacts to the scorer that
    /// produced them.
    pub fn identity_hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("scorer serializes");
        let digest = Sha256::digest(&canonical);
        hex::encode(&digest[..8])
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scorer serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl Classifier for LinearScorer {
    fn predict(&self, case: &[f64]) -> Option<ClassLabel> {
        Some(self.classify(case).clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreProvenance {
    Trained,
    Imported,
}

/// One score per case, aligned with the dataset's case ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVector {
    pub case_ids: Vec<CaseId>,
    pub scores: Vec<f64>,
    pub provenance: ScoreProvenance,
}

impl ScoreVector {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn get(&self, id: CaseId) -> Option<f64> {
        self.case_ids.iter().position(|c| *c == id).map(|i| self.scores[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStrategy {
    /// Midpoint minimizing training errors; widest gap among ties.
    MinError,
    /// Midpoint of the widest gap at a class boundary.
    MidGap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdChoice {
    pub threshold: f64,
    pub errors: usize,
    pub degenerate: bool,
}

/// Picks `T` for scores labelled top/other. Every label other than `top`
/// counts as bottom.
pub fn select_threshold(
    scores: &[f64],
    labels: &[ClassLabel],
    top: &ClassLabel,
    strategy: ThresholdStrategy,
) -> Result<ThresholdChoice> {
    if scores.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: scores.len(), found: labels.len() });
    }
    let n_top = labels.iter().filter(|l| *l == top).count();
    if n_top == 0 || n_top == labels.len() {
        return Err(Error::SingleClass);
    }

    // Distinct score blocks in ascending order: (score, tops, bottoms).
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[i].total_cmp(&scores[j]));
    let mut blocks: Vec<(f64, usize, usize)> = Vec::new();
    for i in order {
        let is_top = labels[i] == *top;
        match blocks.last_mut() {
            Some(b) if b.0 == scores[i] => {
                if is_top {
                    b.1 += 1
                } else {
                    b.2 += 1
                }
            }
            _ => blocks.push((scores[i], is_top as usize, (!is_top) as usize)),
        }
    }
    if blocks.len() == 1 {
        return Ok(ThresholdChoice { threshold: blocks[0].0, errors: n_top, degenerate: true });
    }

    let n_bottom = labels.len() - n_top;
    let mut best: Option<(usize, f64, f64)> = None; // (errors, gap, T)
    let (mut top_le, mut bottom_le) = (0usize, 0usize);
    for k in 0..blocks.len() - 1 {
        top_le += blocks[k].1;
        bottom_le += blocks[k].2;
        let (lo, hi) = (blocks[k].0, blocks[k + 1].0);
        let gap = hi - lo;
        let t = lo + gap / 2.0;
        let errors = top_le + (n_bottom - bottom_le);
        let better = match (strategy, best) {
            (_, None) => true,
            (ThresholdStrategy::MinError, Some((e, g, _))) => errors < e || (errors == e && gap > g),
            (ThresholdStrategy::MidGap, Some((_, g, _))) => {
                let boundary = !(blocks[k].1 == 0 && blocks[k + 1].1 == 0 || blocks[k].2 == 0 && blocks[k + 1].2 == 0);
                boundary && gap > g
            }
        };
        let eligible = match strategy {
            ThresholdStrategy::MinError => true,
            ThresholdStrategy::MidGap => {
                !(blocks[k].1 == 0 && blocks[k + 1].1 == 0 || blocks[k].2 == 0 && blocks[k + 1].2 == 0)
            }
        };
        if eligible && better {
            best = Some((errors, gap, t));
        }
    }
    let (errors, _, threshold) = best.expect("both classes present implies a class boundary");
    Ok(ThresholdChoice { threshold, errors, degenerate: false })
}

fn class_rows(d: &Dataset, label: &ClassLabel) -> Vec<usize> {
    (0..d.len()).filter(|&r| d.labels()[r] == *label).collect()
}

/// Regularized two-class Fisher direction `(S_W + λI)^{-1} (μ_top − μ_bottom)`
/// with `λ = 1e-6 · trace(S_W) / n_attributes`.
pub fn fisher_direction(d: &Dataset, top: &ClassLabel, bottom: &ClassLabel) -> Result<Vec<f64>> {
    let n = d.n_attributes();
    let top_rows = class_rows(d, top);
    let bottom_rows = class_rows(d, bottom);
    for (label, rows) in [(top, &top_rows), (bottom, &bottom_rows)] {
        if rows.len() < 2 {
            return Err(Error::TooFewCases { class: label.0.clone(), needed: 2, found: rows.len() });
        }
    }
    let mean = |rows: &[usize]| -> DVector<f64> {
        let mut m = DVector::zeros(n);
        for &r in rows {
            m += DVector::from_column_slice(d.case(r));
        }
        m / rows.len() as f64
    };
    let mu_top = mean(&top_rows);
    let mu_bottom = mean(&bottom_rows);
    let mut scatter = DMatrix::<f64>::zeros(n, n);
    for (rows, mu) in [(&top_rows, &mu_top), (&bottom_rows, &mu_bottom)] {
        for &r in rows.iter() {
            let dev = DVector::from_column_slice(d.case(r)) - mu;
            scatter += &dev * dev.transpose();
        }
    }
    let singular = || Error::SingularScatter { attributes: d.attributes().to_vec() };
    let trace = scatter.trace();
    if trace <= 0.0 || !trace.is_finite() {
        return Err(singular());
    }
    let lambda = 1e-6 * trace / n as f64;
    for i in 0..n {
        scatter[(i, i)] += lambda;
    }
    let w = scatter.lu().solve(&(mu_top - mu_bottom)).ok_or_else(singular)?;
    if w.iter().any(|v| !v.is_finite()) {
        return Err(singular());
    }
    Ok(w.iter().copied().collect())
}

/// Fisher discriminant on the cases of `top` and `bottom` only, thresholded
/// by the min-error strategy.
pub fn train_fisher(d: &Dataset, top: &ClassLabel, bottom: &ClassLabel) -> Result<LinearScorer> {
    let two = d.filter_classes(&[top.clone(), bottom.clone()]);
    let coefficients = fisher_direction(&two, top, bottom)?;
    let mut scorer = LinearScorer {
        coefficients,
        threshold: 0.0,
        top_class: top.clone(),
        bottom_class: bottom.clone(),
        provenance: ScorerOrigin::Fisher,
    };
    let scores: Vec<f64> = two.cases().iter().map(|c| scorer.score(c)).collect();
    scorer.threshold = select_threshold(&scores, two.labels(), top, ThresholdStrategy::MinError)?.threshold;
    Ok(scorer)
}

/// Turns the two-function model `F1(x) > F2(x)` into `F(x) = F1(x) − F2(x) > 0`.
/// Inputs are read as linear forms; their thresholds do not enter the result.
pub fn reduce_pair(f1: &LinearScorer, f2: &LinearScorer) -> Result<LinearScorer> {
    if f1.coefficients.len() != f2.coefficients.len() {
        return Err(Error::DimensionMismatch { expected: f1.coefficients.len(), found: f2.coefficients.len() });
    }
    Ok(LinearScorer {
        coefficients: f1.coefficients.iter().zip(&f2.coefficients).map(|(a, b)| a - b).collect(),
        threshold: 0.0,
        top_class: f1.top_class.clone(),
        bottom_class: f2.top_class.clone(),
        provenance: ScorerOrigin::ReducedPair,
    })
}

#[derive(Deserialize)]
struct ScoreRow {
    case_id: String,
    score: String,
}

/// Reads externally produced scores from a CSV with `case_id` and `score`
/// columns. Every case of `d` must appear exactly once.
pub fn import_scores<R: Read>(d: &Dataset, source: R) -> Result<ScoreVector> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let index = d.id_index();
    let mut scores: Vec<Option<f64>> = vec![None; d.len()];
    for (i, row) in reader.deserialize::<ScoreRow>().enumerate() {
        let row_no = i + 1;
        let row = row.map_err(|e| Error::Csv { row: row_no, message: e.to_string() })?;
        let id: usize = row.case_id.trim().parse().map_err(|_| Error::NonNumeric {
            row: row_no,
            column: "case_id".into(),
            value: row.case_id.clone(),
        })?;
        let id = CaseId(id);
        let score: f64 =
            row.score.trim().parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| Error::NonNumeric {
                row: row_no,
                column: "score".into(),
                value: row.score.clone(),
            })?;
        let pos = *index.get(&id).ok_or(Error::UnknownCaseId(id))?;
        if scores[pos].replace(score).is_some() {
            return Err(Error::DuplicateCaseId(id));
        }
    }
    let scores = scores
        .into_iter()
        .enumerate()
        .map(|(pos, s)| s.ok_or(Error::MissingScore(d.case_ids()[pos])))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScoreVector { case_ids: d.case_ids().to_vec(), scores, provenance: ScoreProvenance::Imported })
}

/// Uses one attribute of `d` as an externally computed score.
pub fn import_score_column(d: &Dataset, attribute: &str) -> Result<ScoreVector> {
    let col = d.attribute_index(attribute)?;
    Ok(ScoreVector { case_ids: d.case_ids().to_vec(), scores: d.column(col), provenance: ScoreProvenance::Imported })
}

/// Two-level case weights for overlap training: `w1` for cases the original
/// model misclassified, `w2` for the remaining overlap cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapWeights {
    pub w1: f64,
    pub w2: f64,
}

impl Default for OverlapWeights {
    fn default() -> Self {
        OverlapWeights { w1: 2.0, w2: 1.0 }
    }
}

impl OverlapWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.w2 > 0.0 && self.w1 >= self.w2 && self.w1.is_finite()) {
            return Err(Error::InvalidWeights { w1: self.w1, w2: self.w2 });
        }
        Ok(())
    }
}

/// Weighted accuracy `A_w = w1·(formerly misclassified now correct) + w2·(other correct)`.
pub fn weighted_accuracy(
    model: &dyn Classifier,
    d: &Dataset,
    formerly_mis: &BTreeSet<CaseId>,
    weights: OverlapWeights,
) -> f64 {
    let (mut mis_ok, mut other_ok) = (0usize, 0usize);
    for (id, case, label) in d.rows() {
        if model.predict(case).as_ref() == Some(label) {
            if formerly_mis.contains(&id) {
                mis_ok += 1;
            } else {
                other_ok += 1;
            }
        }
    }
    weights.w1 * mis_ok as f64 + weights.w2 * other_ok as f64
}

const PERCEPTRON_MAX_EPOCHS: usize = 20_000;

/// Case-weighted pocket perceptron on mean-centred features. Returns the
/// direction part of the best weight vector seen.
fn weighted_perceptron_direction(d: &Dataset, top: &ClassLabel, case_weight: &[f64]) -> Vec<f64> {
    let n = d.n_attributes();
    let mut mean = vec![0.0; n];
    for c in d.cases() {
        for (m, v) in mean.iter_mut().zip(c) {
            *m += v / d.len() as f64;
        }
    }
    let rows: Vec<(Vec<f64>, f64, f64)> = d
        .rows()
        .zip(case_weight)
        .map(|((_, c, l), &w)| {
            let mut z: Vec<f64> = c.iter().zip(&mean).map(|(v, m)| v - m).collect();
            z.push(1.0);
            (z, if l == top { 1.0 } else { -1.0 }, w)
        })
        .collect();
    let weighted_correct =
        |w: &[f64]| -> f64 { rows.iter().filter(|(z, y, _)| y * dot(z, w) > 0.0).map(|(_, _, cw)| cw).sum() };
    let mut w = vec![0.0; n + 1];
    let mut pocket = (w.clone(), f64::NEG_INFINITY);
    for _ in 0..PERCEPTRON_MAX_EPOCHS {
        let mut mistakes = false;
        for (z, y, cw) in &rows {
            if y * dot(z, &w) <= 0.0 {
                mistakes = true;
                for (wi, zi) in w.iter_mut().zip(z) {
                    *wi += cw * y * zi;
                }
            }
        }
        let score = weighted_correct(&w);
        if score > pocket.1 {
            pocket = (w.clone(), score);
        }
        if !mistakes {
            break;
        }
    }
    pocket.0.truncate(n);
    pocket.0
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn unit(v: &[f64]) -> Option<Vec<f64>> {
    let norm = dot(v, v).sqrt();
    (norm > 0.0 && norm.is_finite()).then(|| v.iter().map(|x| x / norm).collect())
}

/// The finite set of candidate directions searched by
/// [`train_weighted_overlap`], each normalized to unit length and listed
/// with both orientations.
pub fn overlap_candidate_directions(
    d_overlap: &Dataset,
    formerly_mis: &BTreeSet<CaseId>,
    weights: OverlapWeights,
    top: &ClassLabel,
    bottom: &ClassLabel,
    full: Option<&Dataset>,
) -> Vec<Vec<f64>> {
    let n = d_overlap.n_attributes();
    let mut raw: Vec<Vec<f64>> = Vec::new();
    if let Ok(w) = fisher_direction(d_overlap, top, bottom) {
        raw.push(w);
    }
    if let Some(full) = full {
        let two = full.filter_classes(&[top.clone(), bottom.clone()]);
        if let Ok(w) = fisher_direction(&two, top, bottom) {
            raw.push(w);
        }
    }
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        raw.push(e);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e[j] = -1.0;
            raw.push(e);
        }
    }
    let case_weight: Vec<f64> =
        d_overlap.case_ids().iter().map(|id| if formerly_mis.contains(id) { weights.w1 } else { weights.w2 }).collect();
    raw.push(weighted_perceptron_direction(d_overlap, top, &case_weight));

    raw.iter()
        .filter_map(|v| unit(v))
        .flat_map(|u| {
            let neg: Vec<f64> = u.iter().map(|x| -x).collect();
            [u, neg]
        })
        .collect()
}

/// Trains the overlap-area scorer maximizing weighted accuracy over the
/// candidate directions of [`overlap_candidate_directions`], each swept over
/// every threshold midpoint. Ties prefer more correct cases, then a wider
/// gap at the threshold.
pub fn train_weighted_overlap(
    d_overlap: &Dataset,
    formerly_mis: &BTreeSet<CaseId>,
    weights: OverlapWeights,
    top: &ClassLabel,
    bottom: &ClassLabel,
    full: Option<&Dataset>,
) -> Result<LinearScorer> {
    weights.validate()?;
    if d_overlap.is_empty() {
        return Err(Error::InvalidInput("overlap case set is empty".into()));
    }
    let ids: BTreeSet<CaseId> = d_overlap.case_ids().iter().copied().collect();
    if let Some(id) = formerly_mis.iter().find(|id| !ids.contains(id)) {
        return Err(Error::UnknownCaseId(*id));
    }
    let classes = d_overlap.classes();
    if classes.len() < 2 || !classes.contains(top) || !classes.contains(bottom) {
        return Err(Error::SingleClass);
    }
    let two = d_overlap.filter_classes(&[top.clone(), bottom.clone()]);

    let candidates = overlap_candidate_directions(&two, formerly_mis, weights, top, bottom, full);
    let is_mis: Vec<bool> = two.case_ids().iter().map(|id| formerly_mis.contains(id)).collect();
    let is_top: Vec<bool> = two.labels().iter().map(|l| l == top).collect();

    // (A_w, correct, gap), direction, threshold
    type Best = ((f64, usize, f64), Vec<f64>, f64);
    let mut best: Option<Best> = None;
    for dir in candidates {
        let proj: Vec<f64> = two.cases().iter().map(|c| dot(&dir, c)).collect();
        let mut order: Vec<usize> = (0..proj.len()).collect();
        order.sort_by(|&i, &j| proj[i].total_cmp(&proj[j]));

        // Start with everything above the threshold (all predicted top).
        let mut mis_ok = (0..proj.len()).filter(|&i| is_mis[i] && is_top[i]).count();
        let mut other_ok = (0..proj.len()).filter(|&i| !is_mis[i] && is_top[i]).count();
        let mut k = 0;
        while k < order.len() {
            // Move every case tied at this projection below the threshold.
            let v = proj[order[k]];
            while k < order.len() && proj[order[k]] == v {
                let i = order[k];
                let delta: isize = if is_top[i] { -1 } else { 1 };
                if is_mis[i] {
                    mis_ok = (mis_ok as isize + delta) as usize;
                } else {
                    other_ok = (other_ok as isize + delta) as usize;
                }
                k += 1;
            }
            if k == order.len() {
                break;
            }
            let next = proj[order[k]];
            let gap = next - v;
            let t = v + gap / 2.0;
            // Adjacent projections one ulp apart have no midpoint; t rounds onto
            // `next`, which then also falls to the bottom side.
            let (mut m_ok, mut o_ok) = (mis_ok, other_ok);
            if t >= next {
                for &i in order[k..].iter().take_while(|&&i| proj[i] == next) {
                    let ok = if is_mis[i] { &mut m_ok } else { &mut o_ok };
                    *ok = if is_top[i] { *ok - 1 } else { *ok + 1 };
                }
            }
            let key = (weights.w1 * m_ok as f64 + weights.w2 * o_ok as f64, m_ok + o_ok, gap);
            let better = match &best {
                None => true,
                Some((b, _, _)) => key.0 > b.0 || (key.0 == b.0 && (key.1 > b.1 || (key.1 == b.1 && key.2 > b.2))),
            };
            if better {
                best = Some((key, dir.clone(), t));
            }
        }
    }
    let (_, coefficients, threshold) = best.ok_or(Error::SingleClass)?;
    Ok(LinearScorer {
        coefficients,
        threshold,
        top_class: top.clone(),
        bottom_class: bottom.clone(),
        provenance: ScorerOrigin::WeightedOverlap,
    })
}

/// Per-class accuracy summary of a scorer on a dataset.
pub fn accuracy(model: &dyn Classifier, d: &Dataset) -> f64 {
    if d.is_empty() {
        return 1.0;
    }
    let ok = d.rows().filter(|(_, c, l)| model.predict(c).as_ref() == Some(*l)).count();
    ok as f64 / d.len() as f64
}

/// Label counts, for reports.
pub fn label_counts(d: &Dataset) -> BTreeMap<ClassLabel, usize> {
    let mut m = BTreeMap::new();
    for l in d.labels() {
        *m.entry(l.clone()).or_insert(0) += 1;
    }
    m
}
