//! Tabular cases with class labels: CSV ingestion, min-max normalization,
//! engineered features, correlation ordering and case removal.
//!
//! A [`Dataset`] is an immutable value. Every operation returns a new
//! dataset; case identifiers assigned at load time survive filtering so rules
//! and overlap areas can always point back at the original rows.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stable identifier of a case, assigned in file order at load time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CaseId(pub usize);

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClassLabel(pub String);

impl ClassLabel {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClassLabel {
    fn from(s: &str) -> Self {
        ClassLabel(s.to_owned())
    }
}

impl From<String> for ClassLabel {
    fn from(s: String) -> Self {
        ClassLabel(s)
    }
}

/// Per-attribute bounds used by min-max normalization, expressed in raw units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormBounds {
    pub min: f64,
    pub max: f64,
    pub constant: bool,
}

impl NormBounds {
    fn normalize(&self, v: f64) -> f64 {
        if self.constant {
            0.0
        } else {
            (v - self.min) / (self.max - self.min)
        }
    }

    fn denormalize(&self, v: f64) -> f64 {
        if self.constant {
            self.min
        } else {
            v * (self.max - self.min) + self.min
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    attributes: Vec<String>,
    cases: Vec<Vec<f64>>,
    labels: Vec<ClassLabel>,
    case_ids: Vec<CaseId>,
    norm_meta: Option<Vec<NormBounds>>,
    label_column: String,
    /// Position of the label column in the source header.
    label_position: usize,
    /// Original cell text for columns that were never transformed, so that
    /// export reproduces the input byte for byte.
    #[serde(skip)]
    raw_text: Vec<Option<Vec<String>>>,
}

impl Dataset {
    /// Builds a dataset from in-memory values, assigning ids `0..n`.
    pub fn new(attributes: Vec<String>, cases: Vec<Vec<f64>>, labels: Vec<ClassLabel>) -> Result<Self> {
        let ids = (0..cases.len()).map(CaseId).collect();
        Self::with_ids(attributes, cases, labels, ids)
    }

    pub fn with_ids(
        attributes: Vec<String>,
        cases: Vec<Vec<f64>>,
        labels: Vec<ClassLabel>,
        case_ids: Vec<CaseId>,
    ) -> Result<Self> {
        if labels.len() != cases.len() {
            return Err(Error::DimensionMismatch { expected: cases.len(), found: labels.len() });
        }
        if case_ids.len() != cases.len() {
            return Err(Error::DimensionMismatch { expected: cases.len(), found: case_ids.len() });
        }
        for (row, case) in cases.iter().enumerate() {
            if case.len() != attributes.len() {
                return Err(Error::RaggedRow { row: row + 1, expected: attributes.len(), found: case.len() });
            }
            if let Some(col) = case.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonNumeric {
                    row: row + 1,
                    column: attributes[col].clone(),
                    value: case[col].to_string(),
                });
            }
        }
        let mut seen = BTreeSet::new();
        for id in &case_ids {
            if !seen.insert(*id) {
                return Err(Error::DuplicateCaseId(*id));
            }
        }
        let n_attr = attributes.len();
        Ok(Dataset {
            label_position: n_attr,
            attributes,
            cases,
            labels,
            case_ids,
            norm_meta: None,
            label_column: "class".to_owned(),
            raw_text: vec![None; n_attr],
        })
    }

    /// Reads an RFC-4180 CSV with a mandatory header. Every column except
    /// `label_column` must hold finite reals.
    pub fn load_csv<R: Read>(source: R, label_column: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
        let header = reader.headers().map_err(|e| Error::Csv { row: 0, message: e.to_string() })?.clone();
        if header.is_empty() {
            return Err(Error::MissingHeader);
        }
        let label_position = header
            .iter()
            .position(|h| h == label_column)
            .ok_or_else(|| Error::MissingLabelColumn(label_column.to_owned()))?;
        let attributes: Vec<String> =
            header.iter().enumerate().filter(|(i, _)| *i != label_position).map(|(_, h)| h.to_owned()).collect();

        let mut cases = Vec::new();
        let mut labels = Vec::new();
        let mut raw: Vec<Vec<String>> = vec![Vec::new(); attributes.len()];
        for (idx, record) in reader.records().enumerate() {
            let row = idx + 1;
            let record = record.map_err(|e| Error::Csv { row, message: e.to_string() })?;
            if record.len() != header.len() {
                return Err(Error::RaggedRow { row, expected: header.len(), found: record.len() });
            }
            let mut case = Vec::with_capacity(attributes.len());
            for (col, cell) in record.iter().enumerate() {
                if col == label_position {
                    labels.push(ClassLabel(cell.to_owned()));
                    continue;
                }
                let attr = case.len();
                let value: f64 = cell.trim().parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| {
                    Error::NonNumeric { row, column: attributes[attr].clone(), value: cell.to_owned() }
                })?;
                raw[attr].push(cell.to_owned());
                case.push(value);
            }
            cases.push(case);
        }

        let case_ids = (0..cases.len()).map(CaseId).collect();
        Ok(Dataset {
            attributes,
            cases,
            labels,
            case_ids,
            norm_meta: None,
            label_column: label_column.to_owned(),
            label_position,
            raw_text: raw.into_iter().map(Some).collect(),
        })
    }

    /// Writes the dataset in its import layout. Columns that were never
    /// transformed are emitted with their original cell text.
    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(sink);
        let label_at = self.label_position.min(self.attributes.len());
        let mut header: Vec<&str> = self.attributes.iter().map(String::as_str).collect();
        header.insert(label_at, &self.label_column);
        writer.write_record(&header).map_err(csv_write_err)?;
        for (row, case) in self.cases.iter().enumerate() {
            let mut record: Vec<String> = case
                .iter()
                .enumerate()
                .map(|(col, v)| match self.raw_text.get(col) {
                    Some(Some(text)) => text[row].clone(),
                    _ => v.to_string(),
                })
                .collect();
            record.insert(label_at, self.labels[row].0.clone());
            writer.write_record(&record).map_err(csv_write_err)?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn n_attributes(&self) -> usize {
        self.attributes.len()
    }

    pub fn cases(&self) -> &[Vec<f64>] {
        &self.cases
    }

    pub fn case(&self, row: usize) -> &[f64] {
        &self.cases[row]
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    pub fn case_ids(&self) -> &[CaseId] {
        &self.case_ids
    }

    pub fn norm_meta(&self) -> Option<&[NormBounds]> {
        self.norm_meta.as_deref()
    }

    pub fn label_column(&self) -> &str {
        &self.label_column
    }

    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn attribute_index(&self, name: &str) -> Result<usize> {
        self.attributes.iter().position(|a| a == name).ok_or_else(|| Error::UnknownAttribute(name.to_owned()))
    }

    pub fn column(&self, attribute: usize) -> Vec<f64> {
        self.cases.iter().map(|c| c[attribute]).collect()
    }

    /// Distinct class labels in order of first appearance.
    pub fn classes(&self) -> Vec<ClassLabel> {
        let mut out: Vec<ClassLabel> = Vec::new();
        for l in &self.labels {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        out
    }

    pub fn class_count(&self, label: &ClassLabel) -> usize {
        self.labels.iter().filter(|l| *l == label).count()
    }

    /// Row position of every case id.
    pub fn id_index(&self) -> HashMap<CaseId, usize> {
        self.case_ids.iter().enumerate().map(|(row, id)| (*id, row)).collect()
    }

    /// Rows iterator of `(id, values, label)`.
    pub fn rows(&self) -> impl Iterator<Item = (CaseId, &[f64], &ClassLabel)> {
        self.case_ids.iter().zip(&self.cases).zip(&self.labels).map(|((id, c), l)| (*id, c.as_slice(), l))
    }

    fn retain_rows(&self, keep: impl Fn(usize) -> bool) -> Dataset {
        let rows: Vec<usize> = (0..self.len()).filter(|&r| keep(r)).collect();
        Dataset {
            attributes: self.attributes.clone(),
            cases: rows.iter().map(|&r| self.cases[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r].clone()).collect(),
            case_ids: rows.iter().map(|&r| self.case_ids[r]).collect(),
            norm_meta: self.norm_meta.clone(),
            label_column: self.label_column.clone(),
            label_position: self.label_position,
            raw_text: self
                .raw_text
                .iter()
                .map(|col| col.as_ref().map(|text| rows.iter().map(|&r| text[r].clone()).collect()))
                .collect(),
        }
    }

    /// Keeps only cases whose label is in `classes`.
    pub fn filter_classes(&self, classes: &[ClassLabel]) -> Dataset {
        self.retain_rows(|r| classes.contains(&self.labels[r]))
    }

    /// Keeps only the listed ids; unknown ids are rejected.
    pub fn select(&self, ids: &BTreeSet<CaseId>) -> Result<Dataset> {
        self.check_ids(ids)?;
        Ok(self.retain_rows(|r| ids.contains(&self.case_ids[r])))
    }

    /// Drops the covered cases, keeping original ids.
    pub fn remove_covered(&self, covered: &BTreeSet<CaseId>) -> Result<Dataset> {
        self.check_ids(covered)?;
        Ok(self.retain_rows(|r| !covered.contains(&self.case_ids[r])))
    }

    fn check_ids(&self, ids: &BTreeSet<CaseId>) -> Result<()> {
        let known: BTreeSet<CaseId> = self.case_ids.iter().copied().collect();
        match ids.iter().find(|id| !known.contains(id)) {
            Some(id) => Err(Error::UnknownCaseId(*id)),
            None => Ok(()),
        }
    }

    /// Min-max normalizes every attribute over all cases. Constant attributes
    /// map to 0 and are flagged. Bounds are recorded in raw units, so a
    /// dataset that was already normalized composes correctly.
    pub fn minmax_normalize(&self) -> Result<Dataset> {
        if self.is_empty() {
            return Err(Error::InvalidInput("normalization needs at least one case".into()));
        }
        let mut out = self.clone();
        let mut meta = Vec::with_capacity(self.n_attributes());
        for attr in 0..self.n_attributes() {
            let (lo, hi) = self
                .cases
                .iter()
                .map(|c| c[attr])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            let local = NormBounds { min: lo, max: hi, constant: lo == hi };
            for case in &mut out.cases {
                case[attr] = local.normalize(case[attr]);
            }
            let raw_bounds = match self.norm_meta.as_ref().map(|m| m[attr]) {
                Some(prev) => {
                    NormBounds { min: prev.denormalize(lo), max: prev.denormalize(hi), constant: local.constant }
                }
                None => local,
            };
            meta.push(raw_bounds);
            out.raw_text[attr] = None;
        }
        out.norm_meta = Some(meta);
        Ok(out)
    }

    /// Maps normalized values back to raw units using the stored bounds.
    /// Datasets without normalization metadata are returned unchanged.
    pub fn denormalize(&self) -> Dataset {
        let Some(meta) = &self.norm_meta else {
            return self.clone();
        };
        let mut out = self.clone();
        for case in &mut out.cases {
            for (v, b) in case.iter_mut().zip(meta) {
                *v = b.denormalize(*v);
            }
        }
        out.norm_meta = None;
        out.raw_text = vec![None; self.n_attributes()];
        out
    }

    /// Appends one or more columns per expression. Existing columns are left
    /// untouched. On a normalized dataset the new columns are normalized
    /// against their own bounds, which are recorded alongside.
    pub fn engineer_features(&self, exprs: &[FeatureExpr]) -> Result<Dataset> {
        for e in exprs {
            e.validate(self.n_attributes())?;
        }
        let mut out = self.clone();
        for e in exprs {
            for (name, column) in e.evaluate(self) {
                if out.attributes.contains(&name) {
                    return Err(Error::InvalidFeature(format!("column `{name}` already exists")));
                }
                let column = match out.norm_meta.as_mut() {
                    Some(meta) => {
                        let (lo, hi) = column
                            .iter()
                            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
                        let bounds = if column.is_empty() {
                            NormBounds { min: 0.0, max: 0.0, constant: true }
                        } else {
                            NormBounds { min: lo, max: hi, constant: lo == hi }
                        };
                        meta.push(bounds);
                        column.iter().map(|v| bounds.normalize(*v)).collect()
                    }
                    None => column,
                };
                if let Some(col) = column.iter().position(|v| !v.is_finite()) {
                    return Err(Error::InvalidFeature(format!(
                        "`{name}` is not finite for case {}",
                        self.case_ids[col]
                    )));
                }
                for (case, v) in out.cases.iter_mut().zip(column) {
                    case.push(v);
                }
                out.attributes.push(name);
                out.raw_text.push(None);
            }
        }
        Ok(out)
    }

    /// Greedy correlation chain: start from the attribute with the highest
    /// mean absolute Pearson correlation to the others, then repeatedly place
    /// the unplaced attribute most correlated (in absolute value) with the one
    /// placed last. Ties go to the lower index.
    pub fn sort_attributes_by_correlation(&self) -> Result<Vec<usize>> {
        if self.len() < 2 {
            return Err(Error::InvalidInput("correlation ordering needs at least two cases".into()));
        }
        let n = self.n_attributes();
        if n == 0 {
            return Ok(Vec::new());
        }
        let columns: Vec<Vec<f64>> = (0..n).map(|a| self.column(a)).collect();
        let mut corr = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let r = pearson(&columns[i], &columns[j]).abs();
                corr[i][j] = r;
                corr[j][i] = r;
            }
        }
        let mean_abs = |i: usize| {
            if n == 1 {
                0.0
            } else {
                corr[i].iter().sum::<f64>() / (n - 1) as f64
            }
        };
        let mut start = 0;
        for i in 1..n {
            if mean_abs(i) > mean_abs(start) {
                start = i;
            }
        }
        let mut order = vec![start];
        let mut placed = vec![false; n];
        placed[start] = true;
        while order.len() < n {
            let last = *order.last().unwrap();
            let next = (0..n)
                .filter(|&j| !placed[j])
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if corr[last][b] >= corr[last][j] => Some(b),
                    _ => Some(j),
                })
                .unwrap();
            placed[next] = true;
            order.push(next);
        }
        Ok(order)
    }
}

fn csv_write_err(e: csv::Error) -> Error {
    Error::Csv { row: 0, message: e.to_string() }
}

/// Pearson correlation; 0 when either column is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrigFn {
    Sin,
    Cos,
    Tan,
}

impl TrigFn {
    fn apply(self, v: f64) -> f64 {
        match self {
            TrigFn::Sin => v.sin(),
            TrigFn::Cos => v.cos(),
            TrigFn::Tan => v.tan(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            TrigFn::Sin => "sin",
            TrigFn::Cos => "cos",
            TrigFn::Tan => "tan",
        }
    }
}

/// A derived attribute. Operands are attribute indices of the dataset the
/// expression is applied to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureExpr {
    /// `x_a - x_b`
    Difference {
        a: usize,
        b: usize,
    },
    /// Slope of the inter-axis segment from `from` to `to` with unit axis spacing.
    Slope {
        from: usize,
        to: usize,
    },
    WeightedSum {
        operands: Vec<usize>,
        weights: Vec<f64>,
    },
    /// `x_i - x_{i+1}` for consecutive operands; yields `len - 1` columns.
    ForwardDifference {
        operands: Vec<usize>,
    },
    /// `x_{i+1} - x_i` for consecutive operands; yields `len - 1` columns.
    BackwardDifference {
        operands: Vec<usize>,
    },
    Trig {
        operand: usize,
        function: TrigFn,
    },
}

impl FeatureExpr {
    fn operands(&self) -> Vec<usize> {
        match self {
            FeatureExpr::Difference { a, b } => vec![*a, *b],
            FeatureExpr::Slope { from, to } => vec![*from, *to],
            FeatureExpr::WeightedSum { operands, .. }
            | FeatureExpr::ForwardDifference { operands }
            | FeatureExpr::BackwardDifference { operands } => operands.clone(),
            FeatureExpr::Trig { operand, .. } => vec![*operand],
        }
    }

    pub fn validate(&self, n_attributes: usize) -> Result<()> {
        if let Some(bad) = self.operands().into_iter().find(|&i| i >= n_attributes) {
            return Err(Error::InvalidFeature(format!(
                "operand index {bad} out of range for {n_attributes} attributes"
            )));
        }
        match self {
            FeatureExpr::WeightedSum { operands, weights } => {
                if operands.is_empty() || operands.len() != weights.len() {
                    return Err(Error::InvalidFeature(format!(
                        "weighted sum needs one weight per operand ({} operands, {} weights)",
                        operands.len(),
                        weights.len()
                    )));
                }
                if weights.iter().any(|w| !w.is_finite()) {
                    return Err(Error::InvalidFeature("weights must be finite".into()));
                }
            }
            FeatureExpr::ForwardDifference { operands } | FeatureExpr::BackwardDifference { operands }
                if operands.len() < 2 =>
            {
                return Err(Error::InvalidFeature("differences need at least two operands".into()));
            }
            _ => {}
        }
        Ok(())
    }

    /// Column names and values, in output order.
    fn evaluate(&self, d: &Dataset) -> Vec<(String, Vec<f64>)> {
        let name = |i: usize| d.attributes[i].as_str();
        let map = |f: &dyn Fn(&[f64]) -> f64| d.cases.iter().map(|c| f(c)).collect::<Vec<_>>();
        match self {
            FeatureExpr::Difference { a, b } => {
                vec![(format!("diff({},{})", name(*a), name(*b)), map(&|c| c[*a] - c[*b]))]
            }
            FeatureExpr::Slope { from, to } => {
                vec![(format!("slope({},{})", name(*from), name(*to)), map(&|c| c[*to] - c[*from]))]
            }
            FeatureExpr::WeightedSum { operands, weights } => {
                let terms: Vec<String> =
                    operands.iter().zip(weights).map(|(i, w)| format!("{w}*{}", name(*i))).collect();
                vec![(
                    format!("wsum({})", terms.join(",")),
                    map(&|c| operands.iter().zip(weights).map(|(i, w)| w * c[*i]).sum()),
                )]
            }
            FeatureExpr::ForwardDifference { operands } => operands
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    (format!("fdiff({},{})", name(a), name(b)), map(&|c| c[a] - c[b]))
                })
                .collect(),
            FeatureExpr::BackwardDifference { operands } => operands
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0], w[1]);
                    (format!("bdiff({},{})", name(b), name(a)), map(&|c| c[b] - c[a]))
                })
                .collect(),
            FeatureExpr::Trig { operand, function } => {
                vec![(format!("{}({})", function.name(), name(*operand)), map(&|c| function.apply(c[*operand])))]
            }
        }
    }
}
