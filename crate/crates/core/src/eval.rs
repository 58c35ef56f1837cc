//! Accuracy harness: majority baseline, Ekman adapter, per-language and
//! pooled accuracy, report rendering.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::{
    agreement_filter, filter_neutral, split, EkmanLabel, GoldLabel, LabeledExample, Language,
    SplitConfig,
};
use crate::engine::Engine;
use crate::error::EvalError;
use crate::model::{Emotion, EmotionLabel};

pub const MAJORITY: &str = "majority";
pub const RBEM_EMO: &str = "rbem-emo";
pub const EXTERNAL: &str = "external";

/// Always predicts the most frequent training label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorityBaseline {
    label: GoldLabel,
}

impl MajorityBaseline {
    /// Ties go to the lexicographically smallest label name.
    pub fn fit<'a>(labels: impl IntoIterator<Item = &'a GoldLabel>) -> Result<Self, EvalError> {
        let mut counts: HashMap<GoldLabel, usize> = HashMap::new();
        for l in labels {
            *counts.entry(*l).or_default() += 1;
        }
        counts
            .into_iter()
            .max_by(|(a, ca), (b, cb)| ca.cmp(cb).then_with(|| b.name().cmp(a.name())))
            .map(|(label, _)| MajorityBaseline { label })
            .ok_or(EvalError::EmptyTrainingSet)
    }

    pub fn label(&self) -> GoldLabel {
        self.label
    }

    pub fn predict(&self, _example: &LabeledExample) -> GoldLabel {
        self.label
    }
}

pub fn majority_baseline(train: &[LabeledExample]) -> Result<MajorityBaseline, EvalError> {
    MajorityBaseline::fit(train.iter().map(|e| &e.label))
}

/// Maps a wheel label onto the Ekman set. Trust and Anticipation have no
/// Ekman counterpart and fall back to `majority`.
pub fn ekman_adapter(label: EmotionLabel, majority: EkmanLabel) -> EkmanLabel {
    match label {
        EmotionLabel::Neutral => EkmanLabel::Neutral,
        EmotionLabel::Emotion(e) => match e {
            Emotion::Joy => EkmanLabel::Happy,
            Emotion::Sadness => EkmanLabel::Sad,
            Emotion::Anger => EkmanLabel::Angry,
            Emotion::Disgust => EkmanLabel::Disgusted,
            Emotion::Fear => EkmanLabel::Fearful,
            Emotion::Surprise => EkmanLabel::Surprised,
            Emotion::Trust | Emotion::Anticipation => majority,
        },
    }
}

fn count_correct<T: PartialEq>(predictions: &[T], gold: &[T]) -> Result<usize, EvalError> {
    if predictions.len() != gold.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::EmptyTestSet);
    }
    Ok(predictions.iter().zip(gold).filter(|(p, g)| p == g).count())
}

/// Fraction of exact matches.
pub fn accuracy<T: PartialEq>(predictions: &[T], gold: &[T]) -> Result<f64, EvalError> {
    let correct = count_correct(predictions, gold)?;
    Ok(correct as f64 / gold.len() as f64)
}

/// Parses `id<TAB>predicted_label` lines.
pub fn parse_predictions(input: &str) -> Result<HashMap<String, String>, EvalError> {
    let mut out = HashMap::new();
    for (idx, row) in input.lines().enumerate() {
        let row = row.strip_suffix('\r').unwrap_or(row);
        if row.trim().is_empty() || row.starts_with('#') {
            continue;
        }
        let (id, label) = row
            .split_once('\t')
            .ok_or_else(|| EvalError::BadPrediction {
                line: idx + 1,
                reason: "expected `id<TAB>label`".into(),
            })?;
        out.insert(id.to_string(), label.trim().to_lowercase());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DatasetKind {
    Affect,
    Twitter,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Affect => "affect",
            DatasetKind::Twitter => "twitter",
        }
    }
}

/// How the pooled `all` row is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Average {
    /// Over all pooled test messages.
    #[default]
    Micro,
    /// Mean of the per-language accuracies.
    Macro,
}

#[derive(Debug, Clone, Default)]
pub struct EvalConfig {
    pub split: SplitConfig,
    pub average: Average,
    /// Third-party predictions keyed by example id.
    pub external: Option<HashMap<String, String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub classifier: String,
    pub slice: String,
    pub accuracy: f64,
    pub correct: usize,
    pub n: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub rows: Vec<ReportRow>,
    pub metadata: Vec<(String, String)>,
    pub warnings: Vec<String>,
}

impl EvalReport {
    pub fn row(&self, classifier: &str, slice: &str) -> Option<&ReportRow> {
        self.rows
            .iter()
            .find(|r| r.classifier == classifier && r.slice == slice)
    }
}

/// Predictions of every classifier on one test slice, as label names.
struct SlicePredictions {
    gold: Vec<String>,
    by_classifier: Vec<(&'static str, Vec<String>)>,
}

fn predict_slice(
    engine: &Engine,
    kind: DatasetKind,
    train: &[LabeledExample],
    test: &[LabeledExample],
    external: Option<&HashMap<String, String>>,
) -> Result<SlicePredictions, EvalError> {
    let majority = majority_baseline(train)?;
    let analyses = engine.analyze_batch(&test.iter().map(|e| &e.tokens[..]).collect::<Vec<_>>());
    let engine_preds = analyses
        .iter()
        .map(|a| match kind {
            DatasetKind::Twitter => a.label.name(),
            DatasetKind::Affect => {
                let fallback = match majority.label() {
                    GoldLabel::Ekman(l) => l,
                    GoldLabel::Plutchik(_) => EkmanLabel::Neutral,
                };
                ekman_adapter(a.label, fallback).name()
            }
        })
        .map(str::to_string)
        .collect();

    let mut by_classifier = vec![
        (
            MAJORITY,
            test.iter()
                .map(|e| majority.predict(e).name().to_string())
                .collect(),
        ),
        (RBEM_EMO, engine_preds),
    ];
    if let Some(ext) = external {
        let preds = test
            .iter()
            .map(|e| {
                ext.get(&e.id)
                    .cloned()
                    .ok_or_else(|| EvalError::MissingPrediction(e.id.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        by_classifier.push((EXTERNAL, preds));
    }
    Ok(SlicePredictions {
        gold: test.iter().map(|e| e.label.name().to_string()).collect(),
        by_classifier,
    })
}

fn row(classifier: &str, slice: &str, correct: usize, n: usize) -> ReportRow {
    ReportRow {
        classifier: classifier.to_string(),
        slice: slice.to_string(),
        accuracy: correct as f64 / n as f64,
        correct,
        n,
    }
}

/// Runs the protocol for one corpus: agreement and neutral filtering, the
/// seeded split (per language for Twitter), then every classifier on the
/// test side. Twitter gets one row per language plus a pooled `all` row.
pub fn eval_run(
    engine: &Engine,
    kind: DatasetKind,
    examples: Vec<LabeledExample>,
    config: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let mut report = EvalReport {
        metadata: vec![
            ("dataset".into(), kind.name().into()),
            ("neutral".into(), config.split.include_neutral.to_string()),
            (
                "train_fraction".into(),
                format!("{}", config.split.train_fraction),
            ),
            ("seed".into(), config.split.seed.to_string()),
            (
                "average".into(),
                format!("{:?}", config.average).to_lowercase(),
            ),
        ],
        ..Default::default()
    };
    let examples = filter_neutral(agreement_filter(examples), config.split.include_neutral);
    let external = config.external.as_ref();

    match kind {
        DatasetKind::Affect => {
            let (train, test) = split(&examples, &config.split);
            report
                .metadata
                .push(("sizes".into(), format!("{}/{}", train.len(), test.len())));
            if test.is_empty() {
                report
                    .warnings
                    .push("empty test slice `all` omitted".into());
                return Ok(report);
            }
            let preds = predict_slice(engine, kind, &train, &test, external)?;
            for (name, p) in &preds.by_classifier {
                let correct = count_correct(p, &preds.gold)?;
                report
                    .rows
                    .push(row(name, "all", correct, preds.gold.len()));
            }
        }
        DatasetKind::Twitter => {
            let mut slices = Vec::new();
            for lang in Language::ALL {
                let part: Vec<LabeledExample> = examples
                    .iter()
                    .filter(|e| e.language == Some(lang))
                    .cloned()
                    .collect();
                let (train, test) = split(&part, &config.split);
                report.metadata.push((
                    format!("sizes.{lang}"),
                    format!("{}/{}", train.len(), test.len()),
                ));
                if test.is_empty() || train.is_empty() {
                    let side = if test.is_empty() { "test" } else { "training" };
                    report
                        .warnings
                        .push(format!("empty {side} slice `{lang}` omitted"));
                    continue;
                }
                slices.push((lang, predict_slice(engine, kind, &train, &test, external)?));
            }
            let names: Vec<&str> = slices
                .first()
                .map(|(_, s)| s.by_classifier.iter().map(|(n, _)| *n).collect())
                .unwrap_or_default();
            for name in names {
                let mut per_lang = Vec::new();
                for (lang, s) in &slices {
                    let (_, p) = s.by_classifier.iter().find(|(n, _)| *n == name).unwrap();
                    let correct = count_correct(p, &s.gold)?;
                    let r = row(name, lang.code(), correct, s.gold.len());
                    per_lang.push(r.clone());
                    report.rows.push(r);
                }
                let correct: usize = per_lang.iter().map(|r| r.correct).sum();
                let n: usize = per_lang.iter().map(|r| r.n).sum();
                let mut all = row(name, "all", correct, n);
                if config.average == Average::Macro {
                    all.accuracy =
                        per_lang.iter().map(|r| r.accuracy).sum::<f64>() / per_lang.len() as f64;
                }
                report.rows.push(all);
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Tsv,
}

fn percent(acc: f64) -> String {
    format!("{:.1}", acc * 100.0)
}

/// Renders rows in insertion order with accuracies as one-decimal percents.
pub fn render_report(report: &EvalReport, format: ReportFormat) -> String {
    let mut out = String::new();
    match format {
        ReportFormat::Tsv => {
            out.push_str("classifier\tslice\taccuracy\tn\n");
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    r.classifier,
                    r.slice,
                    percent(r.accuracy),
                    r.n
                );
            }
        }
        ReportFormat::Text => {
            for (k, v) in &report.metadata {
                let _ = writeln!(out, "# {k}: {v}");
            }
            for w in &report.warnings {
                let _ = writeln!(out, "# warning: {w}");
            }
            let _ = writeln!(
                out,
                "{:<12} {:<6} {:>8} {:>7}",
                "classifier", "slice", "acc(%)", "n"
            );
            for r in &report.rows {
                let _ = writeln!(
                    out,
                    "{:<12} {:<6} {:>8} {:>7}",
                    r.classifier,
                    r.slice,
                    percent(r.accuracy),
                    r.n
                );
            }
        }
    }
    out
}
