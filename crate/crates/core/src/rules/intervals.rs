use std::collections::BTreeSet;

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};

use super::IntervalRule;

/// Maximal single-class runs of `attribute` values, closed at observed
/// values. A value shared by cases of different classes ends a run. Runs
/// covering fewer than `min_coverage` cases are dropped. Output is in
/// ascending order of the interval start.
pub fn discover_pure_intervals(
    d: &Dataset,
    attribute: usize,
    min_coverage: usize,
    iteration: usize,
) -> Result<Vec<IntervalRule>> {
    if attribute >= d.n_attributes() {
        return Err(Error::DimensionMismatch { expected: d.n_attributes(), found: attribute + 1 });
    }
    let mut pairs: Vec<(f64, &ClassLabel)> = d.cases().iter().map(|c| c[attribute]).zip(d.labels()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    // (value, label if every case at this value shares it, count)
    let mut blocks: Vec<(f64, Option<&ClassLabel>, usize)> = Vec::new();
    for (v, l) in pairs {
        match blocks.last_mut() {
            Some(b) if b.0 == v => {
                if b.1 != Some(l) {
                    b.1 = None;
                }
                b.2 += 1;
            }
            _ => blocks.push((v, Some(l), 1)),
        }
    }

    let class_totals = crate::scorers::label_counts(d);
    let name = &d.attributes()[attribute];
    let mut rules = Vec::new();
    let mut run: Option<(f64, f64, &ClassLabel, usize)> = None;
    let mut flush = |run: Option<(f64, f64, &ClassLabel, usize)>| {
        if let Some((lo, hi, label, count)) = run {
            if count >= min_coverage.max(1) {
                // Every case with a value in [lo, hi] belongs to the run.
                let mut rule = IntervalRule::single(attribute, name, lo, hi, label.clone(), iteration);
                rule.coverage = count;
                rule.class_share = count as f64 / class_totals[label] as f64;
                rule.dataset_share = count as f64 / d.len() as f64;
                rules.push(rule);
            }
        }
    };
    for (v, label, count) in blocks {
        match (run.as_mut(), label) {
            (Some(r), Some(l)) if r.2 == l => {
                r.1 = v;
                r.3 += count;
            }
            (_, Some(l)) => {
                flush(run.take());
                run = Some((v, v, l, count));
            }
            (_, None) => flush(run.take()),
        }
    }
    flush(run);
    Ok(rules)
}

/// Greedy cover: rules in decreasing coverage (ties by attribute, then
/// interval start) are kept only if they add a case not yet covered.
pub fn prune_redundant(rules: Vec<IntervalRule>, d: &Dataset) -> Vec<IntervalRule> {
    let mut scored: Vec<(BTreeSet<CaseId>, IntervalRule)> = rules.into_iter().map(|r| (r.covered(d), r)).collect();
    let key = |r: &IntervalRule| {
        let c = r.conditions.first();
        (c.map_or(0, |c| c.attribute), c.map_or(0.0, |c| c.lo))
    };
    scored.sort_by(|(ca, ra), (cb, rb)| {
        let (aa, la) = key(ra);
        let (ab, lb) = key(rb);
        cb.len().cmp(&ca.len()).then(aa.cmp(&ab)).then(la.total_cmp(&lb))
    });
    let mut covered = BTreeSet::new();
    let mut kept = Vec::new();
    for (cases, rule) in scored {
        if !cases.is_subset(&covered) {
            covered.extend(cases);
            kept.push(rule);
        }
    }
    kept
}
