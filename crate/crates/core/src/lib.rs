//! Rule-based emotion detection on the four opposing axes of Plutchik's
//! wheel.
//!
//! Messages are tokenized ([`tokenize()`]), matched against a pattern model
//! ([`CompiledModel`]), and the matches drive an ordered rule pipeline
//! ([`Engine`]) that leaves a per-token emission on each axis. Axis sums pick
//! the label. The [`dataset`] and [`eval`] modules hold the corpus loaders and
//! the accuracy harness.

pub mod dataset;
pub mod engine;
pub mod error;
pub mod eval;
pub mod matcher;
pub mod model;
pub mod model_file;
pub mod tokenize;

pub use engine::{
    axis_scores, classify, derive_feelings, run_pipeline, Analysis, Decay, Engine, EngineConfig,
    Explanation, Feeling, Trace,
};
pub use error::{CompileError, DatasetError, EvalError, ModelError, PatternError};
pub use matcher::{max_matches, CompiledModel, MaxScope};
pub use model::{
    emotion_table, Axis, AxisScores, EmissionState, Emotion, EmotionLabel, Pattern, PatternElement,
    PatternGroup, PatternMatch, TaggedToken,
};
pub use tokenize::tokenize;
