//! Brute-force reference implementations, written independently of the
//! library's sweep algorithms.

#![allow(dead_code)]

use std::collections::BTreeSet;

/// `(attribute, lo, hi, label, coverage)`
pub type Interval = (usize, f64, f64, String, usize);

fn distinct_sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn labels_in(values: &[f64], labels: &[String], lo: f64, hi: f64) -> (BTreeSet<String>, usize) {
    let mut set = BTreeSet::new();
    let mut n = 0;
    for (v, l) in values.iter().zip(labels) {
        if lo <= *v && *v <= hi {
            set.insert(l.clone());
            n += 1;
        }
    }
    (set, n)
}

/// Every interval between two observed values is tried; a pure one is kept
/// when widening it by one observed value on either side breaks purity.
pub fn pure_intervals(cases: &[Vec<f64>], labels: &[String], attribute: usize, min_coverage: usize) -> Vec<Interval> {
    let values: Vec<f64> = cases.iter().map(|c| c[attribute]).collect();
    let grid = distinct_sorted(&values);
    let pure = |i: usize, j: usize| -> Option<(String, usize)> {
        let (set, n) = labels_in(&values, labels, grid[i], grid[j]);
        (set.len() == 1).then(|| (set.into_iter().next().unwrap(), n))
    };
    let mut out = Vec::new();
    for i in 0..grid.len() {
        for j in i..grid.len() {
            let Some((label, n)) = pure(i, j) else { continue };
            let left_open = i > 0 && pure(i - 1, j).is_some();
            let right_open = j + 1 < grid.len() && pure(i, j + 1).is_some();
            if !left_open && !right_open && n >= min_coverage.max(1) {
                out.push((attribute, grid[i], grid[j], label, n));
            }
        }
    }
    out
}

fn covered(cases: &[Vec<f64>], alive: &[usize], iv: &Interval) -> BTreeSet<usize> {
    alive.iter().copied().filter(|&r| iv.1 <= cases[r][iv.0] && cases[r][iv.0] <= iv.2).collect()
}

/// `(iteration, interval)` in emission order, plus the rows left uncovered.
pub fn greedy_dnc(
    cases: &[Vec<f64>],
    labels: &[String],
    min_coverage: usize,
    max_iterations: usize,
) -> (Vec<(usize, Interval)>, Vec<usize>) {
    let n_attr = cases.first().map_or(0, |c| c.len());
    let mut alive: Vec<usize> = (0..cases.len()).collect();
    let mut out = Vec::new();
    let mut iteration = 0;
    while !alive.is_empty() && iteration < max_iterations {
        iteration += 1;
        let sub_cases: Vec<Vec<f64>> = alive.iter().map(|&r| cases[r].clone()).collect();
        let sub_labels: Vec<String> = alive.iter().map(|&r| labels[r].clone()).collect();
        let mut candidates: Vec<(BTreeSet<usize>, Interval)> = Vec::new();
        for a in 0..n_attr {
            for iv in pure_intervals(&sub_cases, &sub_labels, a, min_coverage) {
                candidates.push((covered(cases, &alive, &iv), iv));
            }
        }
        if candidates.is_empty() {
            break;
        }
        candidates.sort_by(|(ca, a), (cb, b)| cb.len().cmp(&ca.len()).then(a.0.cmp(&b.0)).then(a.1.total_cmp(&b.1)));
        let mut taken: BTreeSet<usize> = BTreeSet::new();
        for (cov, iv) in candidates {
            if cov.iter().any(|r| !taken.contains(r)) {
                taken.extend(cov);
                out.push((iteration, iv));
            }
        }
        alive.retain(|r| !taken.contains(r));
    }
    (out, alive)
}

/// Minimum training errors over every midpoint between distinct scores.
pub fn min_threshold_errors(scores: &[f64], is_top: &[bool]) -> usize {
    let grid = distinct_sorted(scores);
    grid.windows(2)
        .map(|w| {
            let t = w[0] + (w[1] - w[0]) / 2.0;
            scores.iter().zip(is_top).filter(|(s, top)| if **top { **s <= t } else { **s > t }).count()
        })
        .min()
        .unwrap_or(usize::MAX)
}

/// Upper and lower envelope value of segments `(p, q)` at `t`, sampled directly.
pub fn envelope_at(segments: &[(f64, f64)], t: f64) -> (f64, f64) {
    segments.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (p, q)| {
        let y = p + (q - p) * t;
        (lo.min(y), hi.max(y))
    })
}
