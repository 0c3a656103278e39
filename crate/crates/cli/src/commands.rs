//! Batch subcommands. Each one returns its artifacts as bytes so the same
//! code backs the binary and the tests.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use overlap_boost::datasets::iris;
use overlap_boost::overlap::{
    build_modified_envelope, check_linear_containment, compute_overlap_hyperblock, find_misclassified,
    overlap_for_scorer, ContainmentVerdict, Envelope,
};
use overlap_boost::rules::{boost, dnc_run, to_generalized_dt, AutoHooks, DncConfig};
use overlap_boost::scorers::{accuracy, train_fisher};
use overlap_boost::synth::{evaluate_overlap, generate_synthetic, pure_area_evidence, EvalReport, Region, SynthMode};
use overlap_boost::{
    BoostedModel, CaseId, ClassLabel, Classifier, Dataset, DecisionList, Hyperblock, LinearScorer, OverlapInterval,
    OverlapWeights,
};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "overlap-boost", version, about = "Overlap-area boosting and interval-rule pipelines")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a Fisher scorer and score every case.
    Train(TrainArgs),
    /// Overlap interval, hyperblock and envelope of a scorer.
    Overlap(OverlapArgs),
    /// Boosted model plus accuracy report.
    Boost(BoostArgs),
    /// Divide-and-conquer decision list in automatic mode.
    Dnc(DncArgs),
    /// Synthetic cases in the overlap hyperblock or a pure area.
    Synth(SynthArgs),
    /// Evaluate a saved scorer, boosted model or decision list.
    Eval(EvalArgs),
    /// Start the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV with a header row. The built-in Iris data when omitted.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "class")]
    pub label: String,
    /// Keep only these classes. For two-class commands the first is the top class.
    #[arg(long, value_delimiter = ',')]
    pub classes: Vec<String>,
    /// Min-max normalize using all loaded cases, before the class filter.
    #[arg(long)]
    pub normalize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Directory for the artifacts. Without it the primary artifact goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ScorerArgs {
    /// Scorer JSON from `train`. A Fisher scorer is trained when omitted.
    #[arg(long)]
    pub scorer: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OverlapArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Axis order for the envelope, as attribute indices.
    #[arg(long, value_delimiter = ',')]
    pub axis_order: Vec<usize>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BoostArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Weights w1,w2 for formerly misclassified and other overlap cases.
    #[arg(long, default_value = "2,1", value_parser = parse_weights)]
    pub weights: OverlapWeights,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DncArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Smallest rule coverage. Defaults to max(3, 5% of the smallest class).
    #[arg(long)]
    pub min_coverage: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub max_iterations: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RegionKind {
    /// Hyperblock of the misclassified cases.
    Overlap,
    /// Cases of `--class` scored outside the overlap interval.
    Pure,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long, value_enum, default_value = "overlap")]
    pub region: RegionKind,
    /// Class of the pure area.
    #[arg(long)]
    pub class: Option<String>,
    /// uniform_hb, gaussian_center or marginal_pure.
    #[arg(long, default_value = "uniform_hb")]
    pub mode: SynthMode,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Scorer, boosted model or decision list JSON.
    #[arg(long)]
    pub model: PathBuf,
    /// Only cases whose first-scorer score falls in the model's overlap interval.
    #[arg(long)]
    pub overlap_only: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "OVERLAP_BOOST_PORT", default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
}

pub fn parse_weights(s: &str) -> Result<OverlapWeights, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [w1, w2] = parts.as_slice() else {
        return Err(format!("expected w1,w2, got `{s}`"));
    };
    let num = |v: &str| v.parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let w = OverlapWeights { w1: num(w1)?, w2: num(w2)? };
    w.validate().map_err(|e| e.to_string())?;
    Ok(w)
}

/// One output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json<T: Serialize>(name: &str, value: &T) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("artifact serializes");
        bytes.push(b'\n');
        Artifact { name: name.into(), bytes }
    }

    fn text(name: &str, text: String) -> Self {
        Artifact { name: name.into(), bytes: text.into_bytes() }
    }
}

/// Writes every artifact under `out`, or the first one to `stdout`.
pub fn emit(artifacts: &[Artifact], out: Option<&Path>, stdout: &mut dyn std::io::Write) -> CliResult<()> {
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
            for a in artifacts {
                let path = dir.join(&a.name);
                fs::write(&path, &a.bytes).map_err(|source| CliError::Io { path, source })?;
            }
        }
        None => {
            if let Some(a) = artifacts.first() {
                stdout.write_all(&a.bytes).map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
            }
        }
    }
    Ok(())
}

/// Runs a batch command. `serve` is handled by the binary.
pub fn execute(command: &Command) -> CliResult<Vec<Artifact>> {
    match command {
        Command::Train(a) => train(a),
        Command::Overlap(a) => overlap(a),
        Command::Boost(a) => boost_cmd(a),
        Command::Dnc(a) => dnc(a),
        Command::Synth(a) => synth(a),
        Command::Eval(a) => eval(a),
        Command::Serve(_) => Err(CliError::Usage("serve is not a batch command".into())),
    }
}

pub fn out_args(command: &Command) -> Option<&OutArgs> {
    match command {
        Command::Train(a) => Some(&a.out),
        Command::Overlap(a) => Some(&a.out),
        Command::Boost(a) => Some(&a.out),
        Command::Dnc(a) => Some(&a.out),
        Command::Synth(a) => Some(&a.out),
        Command::Eval(a) => Some(&a.out),
        Command::Serve(_) => None,
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

pub fn load_data(args: &DataArgs) -> CliResult<Dataset> {
    let d = match &args.data {
        Some(path) => {
            let file = fs::File::open(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Dataset::load_csv(file, &args.label).map_err(|source| CliError::Data { path: path.clone(), source })?
        }
        None => iris(),
    };
    let d = if args.normalize { d.minmax_normalize()? } else { d };
    if args.classes.is_empty() {
        return Ok(d);
    }
    let classes: Vec<ClassLabel> = args.classes.iter().map(|c| ClassLabel::from(c.as_str())).collect();
    if let Some(missing) = classes.iter().find(|c| d.class_count(c) == 0) {
        return Err(CliError::Usage(format!("class `{missing}` not present in the data")));
    }
    Ok(d.filter_classes(&classes))
}

fn class_pair(d: &Dataset, args: &DataArgs) -> CliResult<(ClassLabel, ClassLabel)> {
    let classes: Vec<ClassLabel> = if args.classes.is_empty() {
        d.classes()
    } else {
        args.classes.iter().map(|c| ClassLabel::from(c.as_str())).collect()
    };
    match classes.as_slice() {
        [top, bottom] => Ok((top.clone(), bottom.clone())),
        _ => Err(CliError::Usage("two classes needed: pass --classes TOP,BOTTOM".into())),
    }
}

fn resolve_scorer(d: &Dataset, data: &DataArgs, scorer: &ScorerArgs) -> CliResult<LinearScorer> {
    match &scorer.scorer {
        Some(path) => {
            let f = LinearScorer::from_json(&read_file(path)?)
                .map_err(|source| CliError::Data { path: path.clone(), source })?;
            if f.coefficients.len() != d.n_attributes() {
                return Err(CliError::Data {
                    path: path.clone(),
                    source: overlap_boost::Error::DimensionMismatch {
                        expected: d.n_attributes(),
                        found: f.coefficients.len(),
                    },
                });
            }
            Ok(f)
        }
        None => {
            let (top, bottom) = class_pair(d, data)?;
            Ok(train_fisher(d, &top, &bottom)?)
        }
    }
}

fn train(a: &TrainArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let (top, bottom) = class_pair(&d, &a.data)?;
    let f = train_fisher(&d, &top, &bottom)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["case_id", "label", "score", "predicted"]).map_err(csv_err)?;
    for (id, c, l) in d.rows() {
        let s = f.score(c);
        w.write_record([id.0.to_string(), l.to_string(), s.to_string(), f.decide(s).to_string()]).map_err(csv_err)?;
    }
    let scores = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(vec![Artifact::json("scorer.json", &f), Artifact { name: "scores.csv".into(), bytes: scores }])
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Usage(format!("csv output: {e}"))
}

#[derive(Debug, Serialize)]
struct OverlapReport {
    scorer_hash: String,
    top_class: ClassLabel,
    bottom_class: ClassLabel,
    threshold: f64,
    interval: OverlapInterval,
    misclassified: Vec<CaseId>,
    overlap_cases: Vec<CaseId>,
    accuracy: f64,
    /// Accuracy of the scorer on the overlap cases alone.
    overlap_accuracy: Option<f64>,
    hyperblock: Option<Hyperblock>,
    containment: Option<ContainmentVerdict>,
    axis_order: Vec<usize>,
    envelope: Option<Envelope>,
}

fn overlap(a: &OverlapArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let f = resolve_scorer(&d, &a.data, &a.scorer)?;
    let two = d.filter_classes(&[f.top_class.clone(), f.bottom_class.clone()]);
    let (scores, interval) = overlap_for_scorer(&two, &f)?;
    let mis = find_misclassified(&scores, two.labels(), &f.top_class, f.threshold)?;
    let inside = interval.cases_inside(&scores);
    let overlap_accuracy = if inside.is_empty() { None } else { Some(accuracy(&f, &two.select(&inside)?)) };
    let axis_order = if a.axis_order.is_empty() { (0..two.n_attributes()).collect() } else { a.axis_order.clone() };
    let (hyperblock, containment, envelope) = if mis.is_empty() {
        (None, None, None)
    } else {
        let mut hb = compute_overlap_hyperblock(&two, &mis)?;
        hb.scorer_hash = interval.scorer_hash.clone();
        let verdict = check_linear_containment(&f, &hb, &interval)?;
        let envelope = build_modified_envelope(two.select(&mis)?.cases(), &axis_order)?;
        (Some(hb), Some(verdict), Some(envelope))
    };
    let report = OverlapReport {
        scorer_hash: f.identity_hash(),
        top_class: f.top_class.clone(),
        bottom_class: f.bottom_class.clone(),
        threshold: f.threshold,
        accuracy: accuracy(&f, &two),
        interval,
        misclassified: mis.into_iter().collect(),
        overlap_cases: inside.into_iter().collect(),
        overlap_accuracy,
        hyperblock,
        containment,
        axis_order,
        envelope,
    };
    Ok(vec![Artifact::json("overlap.json", &report)])
}

#[derive(Debug, Serialize)]
pub struct BoostReport {
    pub parameter_count: usize,
    pub f1_accuracy: f64,
    pub boosted_accuracy: f64,
    pub overlap_cases: usize,
    pub f1_on_overlap: Option<EvalReport>,
    pub f2_on_overlap: Option<EvalReport>,
    pub boosted_on_data: EvalReport,
}

pub fn boost_report(d: &Dataset, model: &BoostedModel, weights: OverlapWeights) -> CliResult<BoostReport> {
    let f1 = &model.f1;
    let two = d.filter_classes(&[f1.top_class.clone(), f1.bottom_class.clone()]);
    let (scores, interval) = overlap_for_scorer(&two, f1)?;
    let inside = interval.cases_inside(&scores);
    let (f1_on_overlap, f2_on_overlap) = if inside.is_empty() {
        (None, None)
    } else {
        let ov = two.select(&inside)?;
        let mis = find_misclassified(&scores, two.labels(), &f1.top_class, f1.threshold)?;
        (Some(evaluate_overlap(f1, &ov, None)?), Some(evaluate_overlap(&model.f2, &ov, Some((&mis, weights)))?))
    };
    Ok(BoostReport {
        parameter_count: model.parameter_count(),
        f1_accuracy: accuracy(f1, &two),
        boosted_accuracy: accuracy(model, &two),
        overlap_cases: inside.len(),
        f1_on_overlap,
        f2_on_overlap,
        boosted_on_data: evaluate_overlap(model, &two, None)?.with_overlap_hits(&two, f1, &model.interval),
    })
}

fn boost_cmd(a: &BoostArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let f1 = resolve_scorer(&d, &a.data, &a.scorer)?;
    let model = boost(&d, f1, a.weights)?;
    let report = boost_report(&d, &model, a.weights)?;
    Ok(vec![Artifact::json("boosted.json", &model), Artifact::json("report.json", &report)])
}

fn dnc(a: &DncArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let mut config = DncConfig::for_dataset(&d);
    if let Some(m) = a.min_coverage {
        config.min_coverage = m;
    }
    config.max_iterations = a.max_iterations;
    let list = dnc_run(&d, config, &mut AutoHooks)?;
    let text = format!("{}\n{}", list.render_text(), to_generalized_dt(&list).render_text());
    Ok(vec![Artifact::json("decision_list.json", &list), Artifact::text("rules.txt", text)])
}

fn synth(a: &SynthArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let f = resolve_scorer(&d, &a.data, &a.scorer)?;
    let two = d.filter_classes(&[f.top_class.clone(), f.bottom_class.clone()]);
    let (scores, interval) = overlap_for_scorer(&two, &f)?;
    let mis = find_misclassified(&scores, two.labels(), &f.top_class, f.threshold)?;
    let hb = if mis.is_empty() {
        None
    } else {
        let mut hb = compute_overlap_hyperblock(&two, &mis)?;
        hb.scorer_hash = interval.scorer_hash.clone();
        Some(hb)
    };
    let region = match a.region {
        RegionKind::Overlap => Region::Hyperblock(
            hb.clone().ok_or_else(|| CliError::Usage("the scorer misclassifies nothing; no overlap region".into()))?,
        ),
        RegionKind::Pure => {
            let class = ClassLabel::from(
                a.class.as_deref().ok_or_else(|| CliError::Usage("--region pure needs --class".into()))?,
            );
            if class != f.top_class && class != f.bottom_class {
                return Err(CliError::Usage(format!("class `{class}` is not scored by this scorer")));
            }
            let ids: BTreeSet<CaseId> = scores
                .case_ids
                .iter()
                .zip(&scores.scores)
                .zip(two.labels())
                .filter(|((_, s), l)| **l == class && !interval.contains(**s))
                .map(|((id, _), _)| *id)
                .collect();
            Region::pure_area(&two, class, &ids)?
        }
    };
    let batch = generate_synthetic(&region, a.n, a.mode, a.out.seed)?;
    let mut csv = Vec::new();
    batch.write_csv(two.attributes(), &mut csv)?;
    let mut artifacts =
        vec![Artifact { name: "synthetic.csv".into(), bytes: csv }, Artifact::json("region.json", &region)];
    if a.region == RegionKind::Pure {
        let evidence = pure_area_evidence(&batch, &f, &interval, hb.as_ref(), None)?;
        artifacts.push(Artifact::json("evidence.json", &evidence));
    }
    Ok(artifacts)
}

/// A saved model of any supported kind.
pub enum SavedModel {
    Scorer(LinearScorer),
    Boosted(BoostedModel),
    Rules(DecisionList),
}

impl SavedModel {
    pub fn parse(text: &str) -> overlap_boost::Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if value.get("f1").is_some() {
            Ok(SavedModel::Boosted(BoostedModel::from_json(text)?))
        } else if value.get("rules").is_some() {
            Ok(SavedModel::Rules(DecisionList::from_json(text)?))
        } else {
            Ok(SavedModel::Scorer(LinearScorer::from_json(text)?))
        }
    }

    fn classifier(&self) -> &dyn Classifier {
        match self {
            SavedModel::Scorer(m) => m,
            SavedModel::Boosted(m) => m,
            SavedModel::Rules(m) => m,
        }
    }

    fn dimension(&self) -> usize {
        match self {
            SavedModel::Scorer(m) => m.coefficients.len(),
            SavedModel::Boosted(m) => m.f1.coefficients.len(),
            SavedModel::Rules(m) => m.attributes.len(),
        }
    }
}

fn eval(a: &EvalArgs) -> CliResult<Vec<Artifact>> {
    let d = load_data(&a.data)?;
    let model =
        SavedModel::parse(&read_file(&a.model)?).map_err(|source| CliError::Data { path: a.model.clone(), source })?;
    if model.dimension() != d.n_attributes() {
        return Err(CliError::Data {
            path: a.model.clone(),
            source: overlap_boost::Error::DimensionMismatch { expected: d.n_attributes(), found: model.dimension() },
        });
    }
    let report = match (&model, a.overlap_only) {
        (SavedModel::Boosted(m), true) => {
            let ids: BTreeSet<CaseId> =
                d.rows().filter(|(_, c, _)| m.interval.contains(m.f1.score(c))).map(|(id, _, _)| id).collect();
            let ov = d.select(&ids)?;
            evaluate_overlap(m, &ov, None)?.with_overlap_hits(&ov, &m.f1, &m.interval)
        }
        (SavedModel::Boosted(m), false) => evaluate_overlap(m, &d, None)?.with_overlap_hits(&d, &m.f1, &m.interval),
        (_, true) => return Err(CliError::Usage("--overlap-only needs a boosted model".into())),
        (m, false) => evaluate_overlap(m.classifier(), &d, None)?,
    };
    Ok(vec![Artifact::json("report.json", &report)])
}
