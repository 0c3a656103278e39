//! Interpretable rule models: pure interval rules, the iterative
//! divide-and-conquer decision list, the boosted two-scorer model and
//! first-order chain and slope rules.

mod boosted;
mod dnc;
mod fol;
mod intervals;

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::Classifier;

pub use boosted::{boost, compose_boosted, BoostedModel, Route};
pub use dnc::iteration_candidates;
pub use dnc::{
    default_min_coverage, dnc_run, to_generalized_dt, AutoHooks, DncConfig, DncHooks, GeneralizedTree,
    IterationDecision, TreeNode,
};
pub use fol::{
    evaluate_slope_rule, infer_slope_rule, test_monotonic_chain, ChainCount, MonotonicRule, SlopeDirection,
    SlopeReport, SlopeRule, SlopeTerm,
};
pub use intervals::{discover_pure_intervals, prune_redundant};

/// `lo ≤ x[attribute] ≤ hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeRange {
    pub attribute: usize,
    pub name: String,
    pub lo: f64,
    pub hi: f64,
}

impl AttributeRange {
    pub fn contains(&self, case: &[f64]) -> bool {
        case.get(self.attribute).is_some_and(|v| self.lo <= *v && *v <= self.hi)
    }
}

/// Conjunction of closed attribute ranges that implies one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRule {
    pub conditions: Vec<AttributeRange>,
    pub label: ClassLabel,
    /// 1-based divide-and-conquer iteration that produced the rule.
    pub iteration: usize,
    pub coverage: usize,
    pub class_share: f64,
    pub dataset_share: f64,
}

impl IntervalRule {
    pub fn matches(&self, case: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.contains(case))
    }

    pub fn covered(&self, d: &Dataset) -> BTreeSet<CaseId> {
        d.rows().filter(|(_, c, _)| self.matches(c)).map(|(id, _, _)| id).collect()
    }

    /// Ids of matched cases whose label differs from the rule's.
    pub fn impurities(&self, d: &Dataset) -> Vec<CaseId> {
        d.rows().filter(|(_, c, l)| self.matches(c) && *l != &self.label).map(|(id, _, _)| id).collect()
    }

    /// Sets coverage and shares from the cases of `d` the rule matches.
    pub fn with_stats(mut self, d: &Dataset) -> Self {
        self.coverage = self.covered(d).len();
        let class_total = d.class_count(&self.label);
        self.class_share = if class_total == 0 { 0.0 } else { self.coverage as f64 / class_total as f64 };
        self.dataset_share = if d.is_empty() { 0.0 } else { self.coverage as f64 / d.len() as f64 };
        self
    }

    /// Rule over a single attribute.
    pub fn single(attribute: usize, name: &str, lo: f64, hi: f64, label: ClassLabel, iteration: usize) -> Self {
        IntervalRule {
            conditions: vec![AttributeRange { attribute, name: name.to_owned(), lo, hi }],
            label,
            iteration,
            coverage: 0,
            class_share: 0.0,
            dataset_share: 0.0,
        }
    }
}

/// What the list answers when no rule matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "label", rename_all = "snake_case")]
pub enum Fallback {
    Abstain,
    MajorityClass(ClassLabel),
    /// Leftover cases the user merged into one class.
    UserMerge(ClassLabel),
}

impl Fallback {
    pub fn label(&self) -> Option<&ClassLabel> {
        match self {
            Fallback::Abstain => None,
            Fallback::MajorityClass(l) | Fallback::UserMerge(l) => Some(l),
        }
    }
}

pub const SEMANTICS_VERSION: u32 = 1;

/// Ordered rule list. A case takes the label of the first rule it matches;
/// rules of iteration `i` only see cases that no earlier iteration matched,
/// and rules within one iteration never disagree on their training cases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionList {
    pub semantics_version: u32,
    pub attributes: Vec<String>,
    pub rules: Vec<IntervalRule>,
    pub fallback: Fallback,
}

impl DecisionList {
    pub fn new(attributes: Vec<String>, rules: Vec<IntervalRule>, fallback: Fallback) -> Self {
        DecisionList { semantics_version: SEMANTICS_VERSION, attributes, rules, fallback }
    }

    pub fn first_match(&self, case: &[f64]) -> Option<&IntervalRule> {
        self.rules.iter().find(|r| r.matches(case))
    }

    pub fn iterations(&self) -> usize {
        self.rules.iter().map(|r| r.iteration).max().unwrap_or(0)
    }

    /// Coverage of each rule on `d` under list semantics: cases matching the
    /// rule and no rule of an earlier iteration.
    pub fn recount(&self, d: &Dataset) -> Vec<usize> {
        self.rules
            .iter()
            .map(|r| {
                d.cases()
                    .iter()
                    .filter(|c| r.matches(c) && !self.rules.iter().any(|e| e.iteration < r.iteration && e.matches(c)))
                    .count()
            })
            .collect()
    }

    /// Total parameters: two bounds per condition.
    pub fn parameter_count(&self) -> usize {
        self.rules.iter().map(|r| 2 * r.conditions.len()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decision list serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let list: DecisionList = serde_json::from_str(text)?;
        if list.semantics_version != SEMANTICS_VERSION {
            return Err(Error::InvalidInput(format!(
                "unsupported decision list semantics version {}",
                list.semantics_version
            )));
        }
        Ok(list)
    }

    /// Human-readable listing, e.g.
    /// `R11: If Int11(x) = true then L = Virginica`.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let names: Vec<String> = (0..self.rules.len()).map(|k| self.rule_name(k)).collect();
        for (k, r) in self.rules.iter().enumerate() {
            let tag = &names[k][1..];
            let ranges: Vec<String> =
                r.conditions.iter().map(|c| format!("{:.4} <= {}(x) <= {:.4}", c.lo, c.name, c.hi)).collect();
            let _ = writeln!(
                out,
                "Int{tag}: {} (Count: {} cases, {:.0}% of class, {:.0}% of the total dataset)",
                ranges.join(" & "),
                r.coverage,
                100.0 * r.class_share,
                100.0 * r.dataset_share
            );
            let earlier: Vec<String> = self
                .rules
                .iter()
                .enumerate()
                .filter(|(_, e)| e.iteration < r.iteration)
                .map(|(j, _)| format!(" & (not {})", names[j]))
                .collect();
            let _ = writeln!(out, "{}: If Int{tag}(x) = true{} then L = {}", names[k], earlier.concat(), r.label);
        }
        let fallback = match &self.fallback {
            Fallback::Abstain => "Otherwise: abstain".to_owned(),
            Fallback::MajorityClass(l) => format!("Otherwise: L = {l} (majority class)"),
            Fallback::UserMerge(l) => format!("Otherwise: L = {l} (merged)"),
        };
        out.push_str(&fallback);
        out.push('\n');
        out
    }

    fn rule_name(&self, k: usize) -> String {
        let r = &self.rules[k];
        let j = 1 + self.rules[..k].iter().filter(|e| e.iteration == r.iteration).count();
        if r.iteration < 10 && j < 10 {
            format!("R{}{}", r.iteration, j)
        } else {
            format!("R{}_{}", r.iteration, j)
        }
    }
}

impl Classifier for DecisionList {
    fn predict(&self, case: &[f64]) -> Option<ClassLabel> {
        match self.first_match(case) {
            Some(r) => Some(r.label.clone()),
            None => self.fallback.label().cloned(),
        }
    }
}
