//! Overlap areas of a thresholded scorer: the score interval `[a, b]` that
//! holds every misclassified case, the matching hyperblock in attribute
//! space, parallel-coordinate envelopes, and the multiclass generalization.

mod envelope;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::scorers::{LinearScorer, ScoreVector};

pub use envelope::{build_modified_envelope, envelope_contains, Breakpoint, Envelope, Strip};

/// Closed score interval `[a, b]`. Scores below `a` belong to the bottom
/// class only and scores above `b` to the top class only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapInterval {
    pub a: f64,
    pub b: f64,
    /// Case realizing `a`.
    pub case_c: Option<CaseId>,
    /// Case realizing `b`.
    pub case_d: Option<CaseId>,
    /// No misclassified cases; the scorer separates the data.
    pub empty: bool,
    /// Only one class had misclassified cases; the other bound is the threshold.
    pub one_sided: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorer_hash: Option<String>,
}

impl OverlapInterval {
    pub fn contains(&self, score: f64) -> bool {
        !self.empty && self.a <= score && score <= self.b
    }

    pub fn length(&self) -> f64 {
        if self.empty {
            0.0
        } else {
            self.b - self.a
        }
    }

    /// Ids of cases whose score falls inside the interval.
    pub fn cases_inside(&self, scores: &ScoreVector) -> BTreeSet<CaseId> {
        scores.case_ids.iter().zip(&scores.scores).filter(|(_, s)| self.contains(**s)).map(|(id, _)| *id).collect()
    }
}

fn check_aligned(scores: &ScoreVector, labels: &[ClassLabel]) -> Result<()> {
    if scores.len() != labels.len() || scores.case_ids.len() != scores.scores.len() {
        return Err(Error::DimensionMismatch { expected: scores.len(), found: labels.len() });
    }
    Ok(())
}

/// Top cases scoring at or below `threshold` and other cases scoring above it.
pub fn find_misclassified(
    scores: &ScoreVector,
    labels: &[ClassLabel],
    top: &ClassLabel,
    threshold: f64,
) -> Result<BTreeSet<CaseId>> {
    check_aligned(scores, labels)?;
    Ok(scores
        .case_ids
        .iter()
        .zip(&scores.scores)
        .zip(labels)
        .filter(|((_, &s), l)| (*l == top) == (s <= threshold))
        .map(|((id, _), _)| *id)
        .collect())
}

/// Interval spanned by the misclassified cases: `a` is the lowest score of a
/// misclassified top case, `b` the highest score of a misclassified bottom
/// case. A side with no misclassified cases uses the threshold.
pub fn compute_overlap_interval(
    scores: &ScoreVector,
    labels: &[ClassLabel],
    top: &ClassLabel,
    threshold: f64,
) -> Result<OverlapInterval> {
    check_aligned(scores, labels)?;
    let mut low_top: Option<(f64, CaseId)> = None;
    let mut high_bottom: Option<(f64, CaseId)> = None;
    for ((&id, &s), l) in scores.case_ids.iter().zip(&scores.scores).zip(labels) {
        if l == top && s <= threshold {
            if low_top.is_none_or(|(v, _)| s < v) {
                low_top = Some((s, id));
            }
        } else if l != top && s > threshold && high_bottom.is_none_or(|(v, _)| s > v) {
            high_bottom = Some((s, id));
        }
    }
    let interval = OverlapInterval {
        a: low_top.map_or(threshold, |(v, _)| v),
        b: high_bottom.map_or(threshold, |(v, _)| v),
        case_c: low_top.map(|(_, id)| id),
        case_d: high_bottom.map(|(_, id)| id),
        empty: low_top.is_none() && high_bottom.is_none(),
        one_sided: low_top.is_none() != high_bottom.is_none(),
        scorer_hash: None,
    };
    if !interval.empty {
        for (&s, l) in scores.scores.iter().zip(labels) {
            assert!(
                !(s < interval.a && l == top) && !(s > interval.b && l != top),
                "overlap interval does not bound the misclassified cases"
            );
        }
    }
    Ok(interval)
}

/// Convenience wrapper: scores `d` with `scorer` and records the scorer hash.
pub fn overlap_for_scorer(d: &Dataset, scorer: &LinearScorer) -> Result<(ScoreVector, OverlapInterval)> {
    let two = d.filter_classes(&[scorer.top_class.clone(), scorer.bottom_class.clone()]);
    let scores = scorer.score_dataset(&two)?;
    let mut interval = compute_overlap_interval(&scores, two.labels(), &scorer.top_class, scorer.threshold)?;
    interval.scorer_hash = Some(scorer.identity_hash());
    Ok((scores, interval))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperblockRole {
    Overlap,
    Pure,
}

/// Axis-aligned box `[lo_i, hi_i]` per attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperblock {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub role: HyperblockRole,
    pub members: Vec<CaseId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scorer_hash: Option<String>,
}

impl Hyperblock {
    pub fn contains(&self, case: &[f64]) -> bool {
        case.len() == self.lo.len()
            && case.iter().zip(self.lo.iter().zip(&self.hi)).all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    /// Corner taking `hi` where the coefficient is positive, `lo` otherwise.
    pub fn top_corner(&self, coefficients: &[f64]) -> Vec<f64> {
        (0..self.lo.len()).map(|i| if coefficients[i] > 0.0 { self.hi[i] } else { self.lo[i] }).collect()
    }

    pub fn bottom_corner(&self, coefficients: &[f64]) -> Vec<f64> {
        (0..self.lo.len()).map(|i| if coefficients[i] > 0.0 { self.lo[i] } else { self.hi[i] }).collect()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo.iter().zip(&self.hi).all(|(l, h)| l == h)
    }
}

/// Componentwise bounding box of the listed cases.
pub fn compute_overlap_hyperblock(d: &Dataset, cases: &BTreeSet<CaseId>) -> Result<Hyperblock> {
    if cases.is_empty() {
        return Err(Error::EmptyMisclassified);
    }
    let members = d.select(cases)?;
    let n = d.n_attributes();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for c in members.cases() {
        for i in 0..n {
            lo[i] = lo[i].min(c[i]);
            hi[i] = hi[i].max(c[i]);
        }
    }
    Ok(Hyperblock { lo, hi, role: HyperblockRole::Overlap, members: members.case_ids().to_vec(), scorer_hash: None })
}

/// Outcome of checking whether the overlap interval covers the hyperblock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ContainmentVerdict {
    /// Both extreme corners score inside `[a, b]`, hence the whole block does.
    ProvenContained { bottom_score: f64, top_score: f64 },
    /// A corner escapes the interval. `tightened` is the part of `[a, b]`
    /// that the block's scores actually reach.
    ShrinkAdvice { bottom_score: f64, top_score: f64, tightened: Option<(f64, f64)> },
    /// Some coefficient is not positive, so the corner argument does not apply.
    NotApplicable { nonpositive: Vec<usize> },
}

/// For a scorer with positive coefficients, the block's extreme scores are
/// attained at its `lo` and `hi` corners.
pub fn check_linear_containment(
    f: &LinearScorer,
    hb: &Hyperblock,
    interval: &OverlapInterval,
) -> Result<ContainmentVerdict> {
    if f.coefficients.len() != hb.dimension() {
        return Err(Error::DimensionMismatch { expected: f.coefficients.len(), found: hb.dimension() });
    }
    let nonpositive: Vec<usize> =
        f.coefficients.iter().enumerate().filter(|(_, k)| **k <= 0.0).map(|(i, _)| i).collect();
    if !nonpositive.is_empty() {
        return Ok(ContainmentVerdict::NotApplicable { nonpositive });
    }
    let bottom_score = f.score(&hb.lo);
    let top_score = f.score(&hb.hi);
    if interval.contains(bottom_score) && interval.contains(top_score) {
        return Ok(ContainmentVerdict::ProvenContained { bottom_score, top_score });
    }
    let lo = interval.a.max(bottom_score);
    let hi = interval.b.min(top_score);
    Ok(ContainmentVerdict::ShrinkAdvice {
        bottom_score,
        top_score,
        tightened: (!interval.empty && lo <= hi).then_some((lo, hi)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentativenessVerdict {
    Representative,
    NotRepresentative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Representativeness {
    pub ratio: f64,
    pub verdict: RepresentativenessVerdict,
}

pub const DEFAULT_RHO: f64 = 0.8;

/// Compares the overlap width found on training data with the width found on
/// the full data. A ratio below `rho` means the training data under-reports
/// the overlap.
pub fn representativeness_test(
    train: &OverlapInterval,
    full: &OverlapInterval,
    rho: f64,
) -> Result<Representativeness> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::InvalidInput(format!("rho must lie in (0, 1], got {rho}")));
    }
    if full.empty && !train.empty {
        return Err(Error::InconsistentIntervals(
            "training data has an overlap area but the full data does not".into(),
        ));
    }
    let ratio = if full.empty {
        1.0
    } else if full.length() == 0.0 {
        if train.empty {
            0.0
        } else {
            1.0
        }
    } else {
        train.length() / full.length()
    };
    let verdict = if ratio < rho {
        RepresentativenessVerdict::NotRepresentative
    } else {
        RepresentativenessVerdict::Representative
    };
    Ok(Representativeness { ratio, verdict })
}

/// Single-class score range outside every overlap interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureRange {
    pub class: ClassLabel,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassOverlap {
    /// Classes by ascending mean score.
    pub class_order: Vec<ClassLabel>,
    pub overlaps: Vec<OverlapInterval>,
    pub pure: Vec<PureRange>,
    /// One overlap interval spans every case.
    pub fully_interleaved: bool,
}

/// Multiclass overlap on one score axis. Classes are ranked by mean score.
/// Sorted by score, two cases are inverted when the lower-scoring one has the
/// higher class rank; a tie in score between different classes is an
/// inversion too. Each maximal run of cases linked by inversions becomes one
/// overlap interval; the rest form pure ranges.
pub fn multiclass_overlap_intervals(scores: &ScoreVector, labels: &[ClassLabel]) -> Result<MulticlassOverlap> {
    check_aligned(scores, labels)?;
    if scores.is_empty() {
        return Err(Error::InvalidInput("no scores".into()));
    }

    let mut classes: Vec<ClassLabel> = Vec::new();
    for l in labels {
        if !classes.contains(l) {
            classes.push(l.clone());
        }
    }
    let mean = |c: &ClassLabel| {
        let v: Vec<f64> = scores.scores.iter().zip(labels).filter(|(_, l)| *l == c).map(|(s, _)| *s).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let means: Vec<f64> = classes.iter().map(mean).collect();
    let mut class_order: Vec<usize> = (0..classes.len()).collect();
    class_order.sort_by(|&i, &j| means[i].total_cmp(&means[j]));
    let mut rank = vec![0usize; classes.len()];
    for (r, &c) in class_order.iter().enumerate() {
        rank[c] = r;
    }
    let case_rank: Vec<usize> = labels.iter().map(|l| rank[classes.iter().position(|c| c == l).unwrap()]).collect();

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores.scores[i].total_cmp(&scores.scores[j]).then(case_rank[i].cmp(&case_rank[j])));

    // Blocks of equal score: (start, end) into `order`, with min/max rank.
    let mut blocks: Vec<(usize, usize, usize, usize)> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        match blocks.last_mut() {
            Some(b) if scores.scores[order[b.0]] == scores.scores[i] => {
                b.1 = k + 1;
                b.2 = b.2.min(case_rank[i]);
                b.3 = b.3.max(case_rank[i]);
            }
            _ => blocks.push((k, k + 1, case_rank[i], case_rank[i])),
        }
    }

    // Block i is inverted with every later block whose min rank is below its
    // max rank. Suffix minima are nondecreasing, so the furthest such block
    // is found by binary search; a block holding several classes is mixed
    // on its own. The union of these ranges gives the mixed runs.
    let nb = blocks.len();
    let mut suffix_min = vec![usize::MAX; nb + 1];
    for j in (0..nb).rev() {
        suffix_min[j] = suffix_min[j + 1].min(blocks[j].2);
    }
    let reach = |i: usize| -> Option<usize> {
        let max_rank = blocks[i].3;
        if i + 1 < nb && suffix_min[i + 1] < max_rank {
            let (mut lo, mut hi) = (i + 1, nb);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if suffix_min[mid] < max_rank {
                    lo = mid
                } else {
                    hi = mid
                }
            }
            Some(lo)
        } else if blocks[i].2 != blocks[i].3 {
            Some(i)
        } else {
            None
        }
    };
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for i in 0..nb {
        let Some(r) = reach(i) else { continue };
        match runs.last_mut() {
            Some(run) if i <= run.1 => run.1 = run.1.max(r),
            _ => runs.push((i, r)),
        }
    }
    let mut mixed_block = vec![false; nb];
    for &(s, e) in &runs {
        mixed_block[s..=e].iter_mut().for_each(|m| *m = true);
    }

    let block_lo = |b: usize| order[blocks[b].0];
    let block_hi = |b: usize| order[blocks[b].1 - 1];
    let overlaps: Vec<OverlapInterval> = runs
        .iter()
        .map(|&(s, e)| {
            let (c, d) = (block_lo(s), block_hi(e));
            OverlapInterval {
                a: scores.scores[c],
                b: scores.scores[d],
                case_c: Some(scores.case_ids[c]),
                case_d: Some(scores.case_ids[d]),
                empty: false,
                one_sided: false,
                scorer_hash: None,
            }
        })
        .collect();

    let mut pure: Vec<PureRange> = Vec::new();
    let mut prev_pure = false;
    for b in 0..nb {
        if mixed_block[b] {
            prev_pure = false;
            continue;
        }
        let class = classes[class_order[blocks[b].2]].clone();
        let (lo, hi) = (scores.scores[block_lo(b)], scores.scores[block_hi(b)]);
        let count = blocks[b].1 - blocks[b].0;
        match pure.last_mut() {
            Some(p) if prev_pure && p.class == class => {
                p.hi = hi;
                p.count += count;
            }
            _ => pure.push(PureRange { class, lo, hi, count }),
        }
        prev_pure = true;
    }

    let fully_interleaved = runs.len() == 1 && runs[0] == (0, nb - 1) && nb > 0;
    Ok(MulticlassOverlap {
        class_order: class_order.iter().map(|&c| classes[c].clone()).collect(),
        overlaps,
        pure,
        fully_interleaved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(scores: &[f64]) -> ScoreVector {
        ScoreVector {
            case_ids: (0..scores.len()).map(CaseId).collect(),
            scores: scores.to_vec(),
            provenance: crate::scorers::ScoreProvenance::Imported,
        }
    }

    fn labels(s: &[&str]) -> Vec<ClassLabel> {
        s.iter().map(|x| ClassLabel::from(*x)).collect()
    }

    #[test]
    fn interval_from_both_sides() {
        // Top "U" at 0.2 and bottom "B" at 0.8 are misclassified around T = 0.5.
        let s = sv(&[0.1, 0.2, 0.4, 0.6, 0.8, 0.9]);
        let l = labels(&["B", "U", "B", "U", "B", "U"]);
        let iv = compute_overlap_interval(&s, &l, &"U".into(), 0.5).unwrap();
        assert_eq!((iv.a, iv.b), (0.2, 0.8));
        assert_eq!((iv.case_c, iv.case_d), (Some(CaseId(1)), Some(CaseId(4))));
        assert!(!iv.empty && !iv.one_sided);
        let mis = find_misclassified(&s, &l, &"U".into(), 0.5).unwrap();
        assert_eq!(mis, [CaseId(1), CaseId(4)].into());
    }

    #[test]
    fn separable_scores_give_empty_interval() {
        let s = sv(&[0.1, 0.2, 0.8, 0.9]);
        let l = labels(&["B", "B", "U", "U"]);
        let iv = compute_overlap_interval(&s, &l, &"U".into(), 0.5).unwrap();
        assert!(iv.empty);
        assert!(!iv.contains(0.5));
        assert_eq!(iv.length(), 0.0);
    }

    #[test]
    fn one_sided_interval_uses_threshold() {
        let s = sv(&[0.1, 0.3, 0.8, 0.9]);
        let l = labels(&["B", "U", "U", "U"]);
        let iv = compute_overlap_interval(&s, &l, &"U".into(), 0.5).unwrap();
        assert!(iv.one_sided);
        assert_eq!((iv.a, iv.b), (0.3, 0.5));
        assert_eq!(iv.case_d, None);
    }

    #[test]
    fn score_equal_to_threshold_is_bottom() {
        let s = sv(&[0.5, 0.9]);
        let l = labels(&["U", "U"]);
        let mis = find_misclassified(&s, &l, &"U".into(), 0.5).unwrap();
        assert_eq!(mis, [CaseId(0)].into());
    }

    #[test]
    fn hyperblock_is_componentwise_box() {
        let d = Dataset::new(
            vec!["x".into(), "y".into()],
            vec![vec![0.1, 0.9], vec![0.5, 0.2], vec![0.3, 0.4]],
            labels(&["a", "b", "a"]),
        )
        .unwrap();
        let hb = compute_overlap_hyperblock(&d, &[CaseId(0), CaseId(1)].into()).unwrap();
        assert_eq!(hb.lo, vec![0.1, 0.2]);
        assert_eq!(hb.hi, vec![0.5, 0.9]);
        assert!(hb.contains(&[0.3, 0.4]));
        let single = compute_overlap_hyperblock(&d, &[CaseId(2)].into()).unwrap();
        assert!(single.is_degenerate());
        assert!(matches!(compute_overlap_hyperblock(&d, &BTreeSet::new()), Err(Error::EmptyMisclassified)));
    }

    fn pos_scorer() -> LinearScorer {
        LinearScorer {
            coefficients: vec![1.0, 1.0],
            threshold: 1.0,
            top_class: "U".into(),
            bottom_class: "B".into(),
            provenance: crate::scorers::ScorerOrigin::External,
        }
    }

    fn interval(a: f64, b: f64) -> OverlapInterval {
        OverlapInterval { a, b, case_c: None, case_d: None, empty: false, one_sided: false, scorer_hash: None }
    }

    fn block(lo: Vec<f64>, hi: Vec<f64>) -> Hyperblock {
        Hyperblock { lo, hi, role: HyperblockRole::Overlap, members: vec![], scorer_hash: None }
    }

    #[test]
    fn containment_verdicts() {
        let f = pos_scorer();
        let v = check_linear_containment(&f, &block(vec![0.3, 0.3], vec![0.6, 0.6]), &interval(0.5, 1.5)).unwrap();
        assert_eq!(v, ContainmentVerdict::ProvenContained { bottom_score: 0.6, top_score: 1.2 });

        let v = check_linear_containment(&f, &block(vec![0.1, 0.1], vec![0.9, 0.9]), &interval(0.5, 1.5)).unwrap();
        match v {
            ContainmentVerdict::ShrinkAdvice { bottom_score, top_score, tightened } => {
                assert!((bottom_score - 0.2).abs() < 1e-12);
                assert!((top_score - 1.8).abs() < 1e-12);
                assert_eq!(tightened, Some((0.5, 1.5)));
            }
            other => panic!("unexpected {other:?}"),
        }

        let mut g = pos_scorer();
        g.coefficients[1] = -1.0;
        let v = check_linear_containment(&g, &block(vec![0.0, 0.0], vec![1.0, 1.0]), &interval(0.0, 1.0)).unwrap();
        assert_eq!(v, ContainmentVerdict::NotApplicable { nonpositive: vec![1] });
    }

    #[test]
    fn representativeness_ratio() {
        let r = representativeness_test(&interval(0.4, 0.6), &interval(0.2, 0.7), 0.8).unwrap();
        assert!((r.ratio - 0.4).abs() < 1e-12);
        assert_eq!(r.verdict, RepresentativenessVerdict::NotRepresentative);
        let r = representativeness_test(&interval(0.2, 0.7), &interval(0.2, 0.7), 0.8).unwrap();
        assert_eq!(r.verdict, RepresentativenessVerdict::Representative);

        let mut empty = interval(0.5, 0.5);
        empty.empty = true;
        let r = representativeness_test(&empty, &interval(0.2, 0.7), 0.8).unwrap();
        assert_eq!(r.ratio, 0.0);
        assert!(matches!(
            representativeness_test(&interval(0.2, 0.7), &empty, 0.8),
            Err(Error::InconsistentIntervals(_))
        ));
        assert!(representativeness_test(&empty, &empty, 1.5).is_err());
    }

    #[test]
    fn multiclass_three_groups() {
        // Ranks by mean: A < B < C. One A/B swap and a clean C tail.
        let s = sv(&[0.0, 0.1, 0.3, 0.2, 0.4, 0.8, 0.9]);
        let l = labels(&["A", "A", "A", "B", "B", "C", "C"]);
        let m = multiclass_overlap_intervals(&s, &l).unwrap();
        assert_eq!(m.class_order, labels(&["A", "B", "C"]));
        assert_eq!(m.overlaps.len(), 1);
        assert_eq!((m.overlaps[0].a, m.overlaps[0].b), (0.2, 0.3));
        assert_eq!((m.overlaps[0].case_c, m.overlaps[0].case_d), (Some(CaseId(3)), Some(CaseId(2))));
        let pure: Vec<(&str, f64, f64, usize)> =
            m.pure.iter().map(|p| (p.class.as_str(), p.lo, p.hi, p.count)).collect();
        assert_eq!(pure, vec![("A", 0.0, 0.1, 2), ("B", 0.4, 0.4, 1), ("C", 0.8, 0.9, 2)]);
        assert!(!m.fully_interleaved);
    }

    #[test]
    fn multiclass_fully_interleaved() {
        let s = sv(&[0.0, 0.1, 0.2, 0.3]);
        let l = labels(&["A", "B", "A", "B"]);
        let m = multiclass_overlap_intervals(&s, &l).unwrap();
        // Means 0.1 and 0.2: B at 0.1 precedes A at 0.2, spanning 0.1..0.2 only.
        assert_eq!(m.overlaps.len(), 1);
        assert_eq!((m.overlaps[0].a, m.overlaps[0].b), (0.1, 0.2));
        assert!(!m.fully_interleaved);

        // H has the higher mean but also the lowest score; L the highest.
        let s = sv(&[0.0, 1.0, 10.0, 11.0, 12.0]);
        let l = labels(&["H", "L", "H", "H", "L"]);
        let m = multiclass_overlap_intervals(&s, &l).unwrap();
        assert_eq!(m.class_order, labels(&["L", "H"]));
        assert!(m.fully_interleaved);
        assert!(m.pure.is_empty());
    }

    #[test]
    fn multiclass_tied_scores_across_classes_are_mixed() {
        let s = sv(&[0.0, 0.5, 0.5, 1.0]);
        let l = labels(&["A", "A", "B", "B"]);
        let m = multiclass_overlap_intervals(&s, &l).unwrap();
        assert_eq!(m.overlaps.len(), 1);
        assert_eq!((m.overlaps[0].a, m.overlaps[0].b), (0.5, 0.5));
        assert_eq!(m.pure.len(), 2);
    }
}
