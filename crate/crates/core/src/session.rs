//! Interactive divide-and-conquer session: a single-writer state machine with
//! full-snapshot undo and a replayable action log.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{CaseId, ClassLabel, Dataset};
use crate::error::{Error, Result};
use crate::overlap::{
    build_modified_envelope, compute_overlap_hyperblock, find_misclassified, overlap_for_scorer, Envelope, Hyperblock,
    OverlapInterval,
};
use crate::rules::{iteration_candidates, AttributeRange, DecisionList, Fallback, IntervalRule};
use crate::scorers::{train_fisher, LinearScorer, ScoreVector};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub normalize: bool,
    /// Restrict to these classes; all when empty.
    #[serde(default)]
    pub classes: Vec<ClassLabel>,
    #[serde(default)]
    pub seed: u64,
}

/// One side of a marked rectangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectRange {
    pub attribute: String,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScorerSource {
    Provided { scorer: LinearScorer },
    TrainFisher { top: ClassLabel, bottom: ClassLabel },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    MarkRectangle {
        ranges: Vec<RectRange>,
        label: ClassLabel,
    },
    AutoSuggest {
        min_coverage: usize,
    },
    /// Indices into the pending candidates.
    AcceptCandidates {
        ids: Vec<usize>,
    },
    RejectCandidates {
        ids: Vec<usize>,
    },
    MergeLeftovers {
        label: ClassLabel,
    },
    ReorderAxes {
        order: Vec<usize>,
    },
    HideClass {
        label: ClassLabel,
        hidden: bool,
    },
    SetScorer {
        source: ScorerSource,
    },
    Undo,
    Finalize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapView {
    pub interval: OverlapInterval,
    pub misclassified: Vec<CaseId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperblock: Option<Hyperblock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub envelope: Option<Envelope>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    pub normalized: bool,
    /// Data the rules are built on (normalized when requested).
    pub working: Dataset,
    pub axis_order: Vec<usize>,
    pub hidden_classes: BTreeSet<ClassLabel>,
    pub scorer: Option<LinearScorer>,
    pub scores: Option<ScoreVector>,
    pub overlap: Option<OverlapView>,
    pub rules: Vec<IntervalRule>,
    pub iteration: usize,
    pub remaining: BTreeSet<CaseId>,
    pub pending: Vec<IntervalRule>,
    pub fallback: Fallback,
    pub seed: u64,
    pub finalized: bool,
}

/// Machine-readable summary of one applied action.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActionDiff {
    pub revision: u64,
    pub rules_added: Vec<IntervalRule>,
    pub cases_removed: Vec<CaseId>,
    pub cases_restored: Vec<CaseId>,
    pub remaining: usize,
    pub candidates: Vec<IntervalRule>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub config: SessionConfig,
    base: Dataset,
    state: SessionState,
    undo: Vec<SessionState>,
    revision: u64,
    log: Vec<Action>,
}

impl Session {
    /// Normalization bounds come from all loaded cases, before any class filter.
    pub fn new(id: impl Into<String>, base: Dataset, config: SessionConfig) -> Result<Self> {
        let scaled = if config.normalize { base.minmax_normalize()? } else { base.clone() };
        let working = if config.classes.is_empty() {
            scaled
        } else {
            for c in &config.classes {
                if base.class_count(c) == 0 {
                    return Err(Error::InvalidInput(format!("class `{c}` not present in the data")));
                }
            }
            scaled.filter_classes(&config.classes)
        };
        let state = SessionState {
            normalized: config.normalize,
            axis_order: (0..working.n_attributes()).collect(),
            remaining: working.case_ids().iter().copied().collect(),
            working,
            hidden_classes: BTreeSet::new(),
            scorer: None,
            scores: None,
            overlap: None,
            rules: Vec::new(),
            iteration: 0,
            pending: Vec::new(),
            fallback: Fallback::Abstain,
            seed: config.seed,
            finalized: false,
        };
        Ok(Session { id: id.into(), config, base, state, undo: Vec::new(), revision: 0, log: Vec::new() })
    }

    pub fn state(&self) -> &SessionState {
        &self.state
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn base(&self) -> &Dataset {
        &self.base
    }

    pub fn log(&self) -> &[Action] {
        &self.log
    }

    pub fn undo_depth(&self) -> usize {
        self.undo.len()
    }

    /// Cases not yet covered by any accepted rule.
    pub fn remaining_data(&self) -> Dataset {
        self.state.working.select(&self.state.remaining).expect("remaining ids belong to the working data")
    }

    pub fn decision_list(&self) -> DecisionList {
        DecisionList::new(
            self.state.working.attributes().to_vec(),
            self.state.rules.clone(),
            self.state.fallback.clone(),
        )
    }

    /// Applies `action` if `expected_revision` matches the current one.
    pub fn apply_at(&mut self, expected_revision: u64, action: Action) -> Result<ActionDiff> {
        if expected_revision != self.revision {
            return Err(Error::StaleRevision { current: self.revision, requested: expected_revision });
        }
        self.apply(action)
    }

    pub fn apply(&mut self, action: Action) -> Result<ActionDiff> {
        if self.state.finalized && !matches!(action, Action::Undo) {
            return Err(Error::InvalidInput("session is finalized".into()));
        }
        let before = self.state.clone();
        let mut diff = match &action {
            Action::Undo => {
                let prior = self.undo.pop().ok_or_else(|| Error::InvalidInput("nothing to undo".into()))?;
                let restored: Vec<CaseId> = prior.remaining.difference(&self.state.remaining).copied().collect();
                let removed: Vec<CaseId> = self.state.remaining.difference(&prior.remaining).copied().collect();
                self.state = prior;
                ActionDiff { cases_restored: restored, cases_removed: removed, ..Default::default() }
            }
            other => match self.transition(other) {
                Ok(diff) => {
                    self.undo.push(before);
                    diff
                }
                Err(e) => {
                    self.state = before;
                    return Err(e);
                }
            },
        };
        self.log.push(action);
        self.revision += 1;
        diff.revision = self.revision;
        diff.remaining = self.state.remaining.len();
        Ok(diff)
    }

    fn transition(&mut self, action: &Action) -> Result<ActionDiff> {
        match action {
            Action::MarkRectangle { ranges, label } => self.mark_rectangle(ranges, label),
            Action::AutoSuggest { min_coverage } => {
                let remaining = self.remaining_data();
                if remaining.is_empty() {
                    return Err(Error::InvalidInput("no remaining cases".into()));
                }
                let candidates = iteration_candidates(&remaining, (*min_coverage).max(1), self.state.iteration + 1);
                self.state.pending = candidates.clone();
                Ok(ActionDiff { candidates, ..Default::default() })
            }
            Action::AcceptCandidates { ids } => {
                let picked = self.pick_pending(ids)?;
                self.state.pending.clear();
                self.add_iteration(picked)
            }
            Action::RejectCandidates { ids } => {
                let drop: BTreeSet<usize> = self.check_pending_ids(ids)?;
                let kept: Vec<IntervalRule> = self
                    .state
                    .pending
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !drop.contains(i))
                    .map(|(_, r)| r.clone())
                    .collect();
                self.state.pending = kept.clone();
                Ok(ActionDiff { candidates: kept, ..Default::default() })
            }
            Action::MergeLeftovers { label } => {
                if self.state.working.class_count(label) == 0 {
                    return Err(Error::InvalidInput(format!("unknown class `{label}`")));
                }
                self.state.fallback = Fallback::UserMerge(label.clone());
                let removed: Vec<CaseId> = std::mem::take(&mut self.state.remaining).into_iter().collect();
                self.state.pending.clear();
                Ok(ActionDiff { cases_removed: removed, ..Default::default() })
            }
            Action::ReorderAxes { order } => {
                let n = self.state.working.n_attributes();
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..n).collect::<Vec<_>>() {
                    return Err(Error::InvalidInput(format!("axis order must be a permutation of 0..{n}")));
                }
                self.state.axis_order = order.clone();
                self.refresh_envelope()?;
                Ok(ActionDiff::default())
            }
            Action::HideClass { label, hidden } => {
                if self.state.working.class_count(label) == 0 {
                    return Err(Error::InvalidInput(format!("unknown class `{label}`")));
                }
                if *hidden {
                    self.state.hidden_classes.insert(label.clone());
                } else {
                    self.state.hidden_classes.remove(label);
                }
                Ok(ActionDiff::default())
            }
            Action::SetScorer { source } => {
                let scorer = match source {
                    ScorerSource::Provided { scorer } => scorer.clone(),
                    ScorerSource::TrainFisher { top, bottom } => train_fisher(&self.state.working, top, bottom)?,
                };
                self.set_scorer(scorer)?;
                Ok(ActionDiff::default())
            }
            Action::Finalize => {
                self.state.finalized = true;
                Ok(ActionDiff::default())
            }
            Action::Undo => unreachable!("handled by apply"),
        }
    }

    fn mark_rectangle(&mut self, ranges: &[RectRange], label: &ClassLabel) -> Result<ActionDiff> {
        if ranges.is_empty() {
            return Err(Error::InvalidInput("rectangle has no ranges".into()));
        }
        let mut conditions = Vec::with_capacity(ranges.len());
        for r in ranges {
            let attribute = self.state.working.attribute_index(&r.attribute)?;
            if r.lo.is_nan() || r.hi.is_nan() || r.lo > r.hi {
                return Err(Error::InvalidInput(format!("empty range [{}, {}] on {}", r.lo, r.hi, r.attribute)));
            }
            conditions.push(AttributeRange { attribute, name: r.attribute.clone(), lo: r.lo, hi: r.hi });
        }
        let rule = IntervalRule {
            conditions,
            label: label.clone(),
            iteration: self.state.iteration + 1,
            coverage: 0,
            class_share: 0.0,
            dataset_share: 0.0,
        };
        self.state.pending.clear();
        self.add_iteration(vec![rule])
    }

    fn check_pending_ids(&self, ids: &[usize]) -> Result<BTreeSet<usize>> {
        if let Some(bad) = ids.iter().find(|&&i| i >= self.state.pending.len()) {
            return Err(Error::InvalidInput(format!("no pending candidate {bad}")));
        }
        Ok(ids.iter().copied().collect())
    }

    fn pick_pending(&self, ids: &[usize]) -> Result<Vec<IntervalRule>> {
        let ids = self.check_pending_ids(ids)?;
        if ids.is_empty() {
            return Err(Error::InvalidInput("no candidates selected".into()));
        }
        Ok(ids.into_iter().map(|i| self.state.pending[i].clone()).collect())
    }

    /// Validates purity on the remaining cases, then removes what the rules cover.
    fn add_iteration(&mut self, rules: Vec<IntervalRule>) -> Result<ActionDiff> {
        let remaining = self.remaining_data();
        let iteration = self.state.iteration + 1;
        let mut covered = BTreeSet::new();
        let mut added = Vec::with_capacity(rules.len());
        for mut rule in rules {
            let offending = rule.impurities(&remaining);
            if !offending.is_empty() {
                return Err(Error::ImpureRectangle { label: rule.label.0.clone(), offending });
            }
            rule.iteration = iteration;
            let rule = rule.with_stats(&remaining);
            covered.extend(rule.covered(&remaining));
            added.push(rule);
        }
        if covered.is_empty() {
            return Err(Error::InvalidInput("the rule covers no remaining case".into()));
        }
        self.state.remaining = self.state.remaining.difference(&covered).copied().collect();
        self.state.rules.extend(added.iter().cloned());
        self.state.iteration = iteration;
        Ok(ActionDiff { rules_added: added, cases_removed: covered.into_iter().collect(), ..Default::default() })
    }

    fn set_scorer(&mut self, scorer: LinearScorer) -> Result<()> {
        let (scores, interval) = overlap_for_scorer(&self.state.working, &scorer)?;
        let two = self.state.working.filter_classes(&[scorer.top_class.clone(), scorer.bottom_class.clone()]);
        let mis = find_misclassified(&scores, two.labels(), &scorer.top_class, scorer.threshold)?;
        let hyperblock = if mis.is_empty() {
            None
        } else {
            let mut hb = compute_overlap_hyperblock(&two, &mis)?;
            hb.scorer_hash = interval.scorer_hash.clone();
            Some(hb)
        };
        self.state.overlap =
            Some(OverlapView { interval, misclassified: mis.into_iter().collect(), hyperblock, envelope: None });
        self.state.scores = Some(scores);
        self.state.scorer = Some(scorer);
        self.refresh_envelope()
    }

    fn refresh_envelope(&mut self) -> Result<()> {
        let Some(view) = self.state.overlap.as_mut() else { return Ok(()) };
        if view.misclassified.is_empty() {
            return Ok(());
        }
        let ids: BTreeSet<CaseId> = view.misclassified.iter().copied().collect();
        let cases = self.state.working.select(&ids)?;
        view.envelope = Some(build_modified_envelope(cases.cases(), &self.state.axis_order)?);
        Ok(())
    }

    /// Rebuilds a session by applying `log` to a fresh one.
    pub fn replay(id: impl Into<String>, base: Dataset, config: SessionConfig, log: &[Action]) -> Result<Self> {
        let mut s = Session::new(id, base, config)?;
        for a in log {
            s.apply(a.clone())?;
        }
        Ok(s)
    }

    pub fn log_ndjson(&self) -> String {
        let mut out = String::new();
        for a in &self.log {
            out.push_str(&serde_json::to_string(a).expect("action serializes"));
            out.push('\n');
        }
        out
    }

    pub fn parse_ndjson(text: &str) -> Result<Vec<Action>> {
        text.lines().filter(|l| !l.trim().is_empty()).map(|l| serde_json::from_str(l).map_err(Error::from)).collect()
    }
}
