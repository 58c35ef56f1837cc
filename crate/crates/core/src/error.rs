use std::io;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("pattern has no elements")]
    Empty,
    #[error("pattern may not begin with a gap")]
    LeadingGap,
    #[error("pattern may not end with a gap")]
    TrailingGap,
    #[error("invalid literal surface `{0}`")]
    BadSurface(String),
    #[error("literal surface `{0}` is not lowercased")]
    NotLowercase(String),
    #[error("invalid tag `{0}`")]
    BadTag(String),
}

#[derive(Debug, Error)]
#[error("invalid pattern #{index}: {source}")]
pub struct CompileError {
    pub index: usize,
    #[source]
    pub source: PatternError,
}

/// One bad line of a model file.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {reason}: `{text}`")]
pub struct ModelLineError {
    pub line: usize,
    pub reason: String,
    pub text: String,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model file: {0}")]
    Io(#[from] io::Error),
    #[error("{} invalid line(s) in model file", .0.len())]
    Invalid(Vec<ModelLineError>),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: unknown language `{code}`")]
    UnknownLanguage { line: usize, code: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("test set is empty")]
    EmptyTestSet,
    #[error("{predictions} predictions for {gold} gold labels")]
    LengthMismatch { predictions: usize, gold: usize },
    #[error("no external prediction for example `{0}`")]
    MissingPrediction(String),
    #[error("external predictions line {line}: {reason}")]
    BadPrediction { line: usize, reason: String },
}
