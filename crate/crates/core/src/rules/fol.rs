use serde::{Deserialize, Serialize};

use crate::dataset::{ClassLabel, Dataset};
use crate::error::{Error, Result};

/// `x[order[0]] > x[order[1]] > …` implies `target`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicRule {
    pub order: Vec<usize>,
    pub target: ClassLabel,
}

impl MonotonicRule {
    pub fn holds(&self, case: &[f64]) -> bool {
        self.order.windows(2).all(|w| case[w[0]] > case[w[1]])
    }

    /// The target class when the chain holds, otherwise no match.
    pub fn classify(&self, case: &[f64]) -> Option<&ClassLabel> {
        self.holds(case).then_some(&self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainCount {
    pub class: ClassLabel,
    pub satisfying: usize,
    pub total: usize,
}

/// Per class, how many cases strictly decrease along `order`.
pub fn test_monotonic_chain(d: &Dataset, order: &[usize]) -> Result<Vec<ChainCount>> {
    if order.len() < 2 {
        return Err(Error::InvalidInput("a chain needs at least two attributes".into()));
    }
    if let Some(&bad) = order.iter().find(|&&a| a >= d.n_attributes()) {
        return Err(Error::DimensionMismatch { expected: d.n_attributes(), found: bad + 1 });
    }
    let rule = MonotonicRule { order: order.to_vec(), target: ClassLabel::from("") };
    Ok(d.classes()
        .into_iter()
        .map(|class| {
            let (satisfying, total) = d
                .rows()
                .filter(|(_, _, l)| **l == class)
                .fold((0, 0), |(s, t), (_, c, _)| (s + rule.holds(c) as usize, t + 1));
            ChainCount { class, satisfying, total }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlopeDirection {
    /// `diff(u) ≥ diff(w)` for every reference case `u`.
    Ge,
    /// `diff(u) ≤ diff(w)` for every reference case `u`.
    Le,
}

/// One comparison of `x_i − x_j` against the reference class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeTerm {
    pub i: usize,
    pub j: usize,
    pub direction: SlopeDirection,
    /// Minimum (for `Ge`) or maximum (for `Le`) of `x_i − x_j` over the reference class.
    pub threshold: f64,
}

impl SlopeTerm {
    /// Strict against the extremum, so no reference training case fires.
    pub fn holds(&self, case: &[f64]) -> bool {
        let diff = case[self.i] - case[self.j];
        match self.direction {
            SlopeDirection::Ge => diff < self.threshold,
            SlopeDirection::Le => diff > self.threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeRule {
    pub terms: Vec<SlopeTerm>,
    pub reference_class: ClassLabel,
    pub inferred_class: ClassLabel,
    /// No terms: the rule fires on every case.
    pub degenerate: bool,
}

impl SlopeRule {
    pub fn fires(&self, case: &[f64]) -> bool {
        self.terms.iter().all(|t| t.holds(case))
    }

    pub fn classify(&self, case: &[f64]) -> Option<&ClassLabel> {
        self.fires(case).then_some(&self.inferred_class)
    }
}

/// Compiles `(i, j, direction)` terms against the reference class cases of `d`.
pub fn infer_slope_rule(
    d: &Dataset,
    reference_class: &ClassLabel,
    inferred_class: &ClassLabel,
    terms: &[(usize, usize, SlopeDirection)],
) -> Result<SlopeRule> {
    let reference: Vec<&[f64]> = d.rows().filter(|(_, _, l)| *l == reference_class).map(|(_, c, _)| c).collect();
    if reference.is_empty() {
        return Err(Error::TooFewCases { class: reference_class.0.clone(), needed: 1, found: 0 });
    }
    if d.class_count(inferred_class) == 0 {
        return Err(Error::TooFewCases { class: inferred_class.0.clone(), needed: 1, found: 0 });
    }
    let n = d.n_attributes();
    let terms = terms
        .iter()
        .map(|&(i, j, direction)| {
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch { expected: n, found: i.max(j) + 1 });
            }
            let diffs = reference.iter().map(|c| c[i] - c[j]);
            let threshold = match direction {
                SlopeDirection::Ge => diffs.fold(f64::INFINITY, f64::min),
                SlopeDirection::Le => diffs.fold(f64::NEG_INFINITY, f64::max),
            };
            Ok(SlopeTerm { i, j, direction, threshold })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SlopeRule {
        degenerate: terms.is_empty(),
        terms,
        reference_class: reference_class.clone(),
        inferred_class: inferred_class.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub rule: SlopeRule,
    pub inferred_total: usize,
    pub inferred_fired: usize,
    pub reference_total: usize,
    pub reference_fired: usize,
    pub other_fired: usize,
    /// Share of the inferred class the rule fires on.
    pub coverage: f64,
    /// Share of firings that hit the inferred class.
    pub precision: f64,
    /// Accuracy on the two classes when non-firing means the reference class.
    pub two_class_accuracy: f64,
}

/// Builds the rule on `d` and reports how it fires on `d`.
pub fn evaluate_slope_rule(
    d: &Dataset,
    reference_class: &ClassLabel,
    inferred_class: &ClassLabel,
    terms: &[(usize, usize, SlopeDirection)],
) -> Result<SlopeReport> {
    let rule = infer_slope_rule(d, reference_class, inferred_class, terms)?;
    let (mut inferred_total, mut inferred_fired) = (0, 0);
    let (mut reference_total, mut reference_fired) = (0, 0);
    let mut other_fired = 0;
    for (_, c, l) in d.rows() {
        let fired = rule.fires(c) as usize;
        if l == inferred_class {
            inferred_total += 1;
            inferred_fired += fired;
        } else if l == reference_class {
            reference_total += 1;
            reference_fired += fired;
        } else {
            other_fired += fired;
        }
    }
    let fired = inferred_fired + reference_fired + other_fired;
    Ok(SlopeReport {
        coverage: inferred_fired as f64 / inferred_total as f64,
        precision: if fired == 0 { 0.0 } else { inferred_fired as f64 / fired as f64 },
        two_class_accuracy: (inferred_fired + reference_total - reference_fired) as f64
            / (inferred_total + reference_total) as f64,
        rule,
        inferred_total,
        inferred_fired,
        reference_total,
        reference_fired,
        other_fired,
    })
}
