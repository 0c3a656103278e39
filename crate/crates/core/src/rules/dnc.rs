use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::Classifier;

use super::intervals::{discover_pure_intervals, prune_redundant};
use super::{DecisionList, Fallback, IntervalRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DncConfig {
    pub min_coverage: usize,
    pub max_iterations: usize,
}

/// `max(3, ⌈5% of the smallest class⌉)`.
pub fn default_min_coverage(d: &Dataset) -> usize {
    let smallest = d.classes().iter().map(|c| d.class_count(c)).min().unwrap_or(0);
    3.max(smallest.div_ceil(20))
}

impl DncConfig {
    pub fn for_dataset(d: &Dataset) -> Self {
        DncConfig { min_coverage: default_min_coverage(d), max_iterations: 100 }
    }
}

/// What the reviewer decided for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationDecision {
    /// Rules to add; each must be pure on the iteration's remaining cases.
    pub accept: Vec<IntervalRule>,
    pub stop: bool,
}

/// Review points of an interactive run.
pub trait DncHooks {
    fn review(&mut self, iteration: usize, remaining: &Dataset, candidates: Vec<IntervalRule>) -> IterationDecision;

    fn leftovers(&mut self, remaining: &Dataset) -> Fallback;
}

/// Accepts every candidate and ends with the majority class of the leftovers.
#[derive(Debug, Default, Clone, Copy)]
pub struct AutoHooks;

fn majority(d: &Dataset) -> Option<ClassLabel> {
    let classes = d.classes();
    let mut best: Option<(usize, ClassLabel)> = None;
    for c in classes {
        let n = d.class_count(&c);
        if best.as_ref().is_none_or(|(m, _)| n > *m) {
            best = Some((n, c));
        }
    }
    best.map(|(_, c)| c)
}

impl DncHooks for AutoHooks {
    fn review(&mut self, _: usize, _: &Dataset, candidates: Vec<IntervalRule>) -> IterationDecision {
        IterationDecision { accept: candidates, stop: false }
    }

    fn leftovers(&mut self, remaining: &Dataset) -> Fallback {
        majority(remaining).map_or(Fallback::Abstain, Fallback::MajorityClass)
    }
}

/// Candidate rules of one iteration: pure intervals on every attribute of the
/// remaining cases, pruned to a minimal cover.
pub fn iteration_candidates(remaining: &Dataset, min_coverage: usize, iteration: usize) -> Vec<IntervalRule> {
    let mut all = Vec::new();
    for a in 0..remaining.n_attributes() {
        all.extend(discover_pure_intervals(remaining, a, min_coverage, iteration).expect("attribute in range"));
    }
    prune_redundant(all, remaining)
}

/// Iterative divide and conquer: each iteration finds pure interval rules on
/// the cases not yet covered, removes what they cover and repeats until
/// nothing is left, no rule qualifies, or the iteration limit is hit.
pub fn dnc_run(d: &Dataset, config: DncConfig, hooks: &mut dyn DncHooks) -> Result<DecisionList> {
    let mut remaining = d.clone();
    let mut rules: Vec<IntervalRule> = Vec::new();
    let mut iteration = 0;
    while !remaining.is_empty() && iteration < config.max_iterations {
        iteration += 1;
        let candidates = iteration_candidates(&remaining, config.min_coverage, iteration);
        if candidates.is_empty() {
            break;
        }
        let decision = hooks.review(iteration, &remaining, candidates);
        let mut covered: BTreeSet<CaseId> = BTreeSet::new();
        for mut rule in decision.accept {
            let offending = rule.impurities(&remaining);
            if !offending.is_empty() {
                return Err(Error::ImpureRectangle { label: rule.label.0.clone(), offending });
            }
            rule.iteration = iteration;
            let rule = rule.with_stats(&remaining);
            covered.extend(rule.covered(&remaining));
            rules.push(rule);
        }
        if covered.is_empty() {
            break;
        }
        remaining = remaining.remove_covered(&covered)?;
        if decision.stop {
            break;
        }
    }
    let fallback = if remaining.is_empty() {
        majority(d).map_or(Fallback::Abstain, Fallback::MajorityClass)
    } else {
        hooks.leftovers(&remaining)
    };
    Ok(DecisionList::new(d.attributes().to_vec(), rules, fallback))
}

/// Generalized decision tree: each level holds one iteration's rules as pure
/// leaves, and an `otherwise` branch leads to the next level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Level { iteration: usize, leaves: Vec<IntervalRule>, otherwise: Box<TreeNode> },
    Fallback { fallback: Fallback },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedTree {
    pub root: TreeNode,
}

pub fn to_generalized_dt(list: &DecisionList) -> GeneralizedTree {
    let mut node = TreeNode::Fallback { fallback: list.fallback.clone() };
    for it in (1..=list.iterations()).rev() {
        let leaves: Vec<IntervalRule> = list.rules.iter().filter(|r| r.iteration == it).cloned().collect();
        if leaves.is_empty() {
            continue;
        }
        node = TreeNode::Level { iteration: it, leaves, otherwise: Box::new(node) };
    }
    GeneralizedTree { root: node }
}

impl GeneralizedTree {
    pub fn depth(&self) -> usize {
        let mut n = 0;
        let mut node = &self.root;
        while let TreeNode::Level { otherwise, .. } = node {
            n += 1;
            node = otherwise;
        }
        n
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let mut node = &self.root;
        let mut indent = 0;
        loop {
            let pad = "  ".repeat(indent);
            match node {
                TreeNode::Level { iteration, leaves, otherwise } => {
                    let _ = writeln!(out, "{pad}level {iteration}");
                    for r in leaves {
                        let ranges: Vec<String> =
                            r.conditions.iter().map(|c| format!("{:.4} <= {} <= {:.4}", c.lo, c.name, c.hi)).collect();
                        let _ = writeln!(out, "{pad}  [{}] -> {} ({} cases)", ranges.join(" & "), r.label, r.coverage);
                    }
                    let _ = writeln!(out, "{pad}  otherwise:");
                    node = otherwise;
                    indent += 2;
                }
                TreeNode::Fallback { fallback } => {
                    let text = fallback.label().map_or("abstain".to_owned(), |l| l.to_string());
                    let _ = writeln!(out, "{pad}-> {text}");
                    return out;
                }
            }
        }
    }
}

impl Classifier for GeneralizedTree {
    fn predict(&self, case: &[f64]) -> Option<ClassLabel> {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Level { leaves, otherwise, .. } => {
                    if let Some(r) = leaves.iter().find(|r| r.matches(case)) {
                        return Some(r.label.clone());
                    }
                    node = otherwise;
                }
                TreeNode::Fallback { fallback } => return fallback.label().cloned(),
            }
        }
    }
}
