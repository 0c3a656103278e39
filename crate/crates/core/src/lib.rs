//! Overlap-area boosting for linear classifiers and interpretable
//! interval-rule models.
//!
//! A scorer `F(x) = k·x` with threshold `T` leaves an interval `[a, b]` of
//! scores where both classes occur. [`overlap`] finds that interval and the
//! matching hyperblock, [`scorers`] trains a second scorer for it, and
//! [`rules`] composes the boosted model or builds divide-and-conquer
//! decision lists of pure interval rules. [`synth`] samples synthetic cases
//! in the areas found, and [`session`] drives the interactive workflow.

pub mod dataset;
pub mod datasets;
pub mod error;
pub mod overlap;
pub mod rules;
pub mod scorers;
pub mod session;
pub mod synth;

pub use dataset::{CaseId, ClassLabel, Dataset, FeatureExpr, NormBounds, TrigFn};
pub use error::{Error, Result};
pub use overlap::{Hyperblock, OverlapInterval};
pub use rules::{BoostedModel, DecisionList, Fallback, IntervalRule};
pub use scorers::{LinearScorer, OverlapWeights, ScoreVector};

/// Anything that maps a case to a class, or abstains.
pub trait Classifier {
    fn predict(&self, case: &[f64]) -> Option<ClassLabel>;
}
