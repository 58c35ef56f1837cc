//! The ordered rule pipeline: emotion emissions, amplifiers, attenuators,
//! right flips, left flips and continuators over the maximal matches, then
//! axis sums and the final label.

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::matcher::{max_matches_with, CompiledModel, MaxScope};
use crate::model::{
    Axis, AxisScores, EmissionState, Emotion, EmotionLabel, PatternGroup, PatternMatch, TaggedToken,
};

/// How emission weight falls off away from a match.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decay {
    /// `exp(-|i - c|)`, distance from the match center.
    #[default]
    Distance,
    /// `exp(-i)`, position from the start of the message.
    AbsoluteIndex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub decay: Decay,
    pub max_scope: MaxScope,
    pub continuators: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            decay: Decay::Distance,
            max_scope: MaxScope::Group,
            continuators: true,
        }
    }
}

/// Sorted, de-duplicated token positions of stop-pattern centers.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stops(Vec<usize>);

impl Stops {
    pub fn new(mut positions: Vec<usize>) -> Self {
        positions.sort_unstable();
        positions.dedup();
        Stops(positions)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, t: usize) -> bool {
        self.0.binary_search(&t).is_ok()
    }

    /// Any stop within `lo..=hi`?
    pub fn any_in(&self, lo: usize, hi: usize) -> bool {
        let k = self.0.partition_point(|&t| t < lo);
        self.0.get(k).is_some_and(|&t| t <= hi)
    }

    fn first_after(&self, pos: usize) -> Option<usize> {
        let k = self.0.partition_point(|&t| t <= pos);
        self.0.get(k).copied()
    }

    fn last_before(&self, pos: usize) -> Option<usize> {
        let k = self.0.partition_point(|&t| t < pos);
        k.checked_sub(1).map(|k| self.0[k])
    }

    /// Tokens a bidirectional rule centered at `c` may touch in an
    /// `n`-token message: exactly those `i` with `!blocked(c, i, self)`.
    pub fn reach(&self, c: usize, n: usize) -> RangeInclusive<usize> {
        if self.contains(c) {
            return c..=c;
        }
        let lo = self.last_before(c).map_or(0, |t| t + 1);
        let hi = self.first_after(c).map_or(n - 1, |t| t - 1);
        lo..=hi
    }

    /// Tokens right of `end` up to (not including) the next stop.
    fn right_of(&self, end: usize, n: usize) -> std::ops::Range<usize> {
        let stop = self.first_after(end).unwrap_or(n).min(n);
        (end + 1).min(stop)..stop
    }

    /// Tokens left of `start` back to (not including) the previous stop.
    fn left_of(&self, start: usize) -> std::ops::Range<usize> {
        let lo = self.last_before(start).map_or(0, |t| t + 1);
        lo..start
    }
}

/// Centers of all stop matches.
pub fn collect_stops(matches: &[PatternMatch]) -> Stops {
    Stops::new(
        matches
            .iter()
            .filter(|m| m.group == PatternGroup::Stop)
            .map(PatternMatch::center)
            .collect(),
    )
}

/// True iff a stop lies between `c` and `i` inclusive. A token is never
/// blocked from its own center.
pub fn blocked(c: usize, i: usize, stops: &Stops) -> bool {
    if c == i {
        return false;
    }
    stops.any_in(c.min(i), c.max(i))
}

fn distance_weight(i: usize, c: usize) -> f64 {
    (-(i.abs_diff(c) as f64)).exp()
}

/// One written cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub axis: Axis,
    pub token: usize,
    pub old: f64,
    pub new: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: String,
    #[serde(rename = "match")]
    pub matched: PatternMatch,
    pub affected: Vec<Change>,
}

/// Every mutation made by one pipeline run, in execution order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Re-applies every change to a fresh `len`-token state.
    pub fn replay(&self, len: usize) -> EmissionState {
        let mut state = EmissionState::new(len);
        for change in self.steps.iter().flat_map(|s| &s.affected) {
            state.set(change.axis, change.token, change.new);
        }
        state
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Sink for trace steps; `()` discards them.
pub trait Recorder {
    fn enabled(&self) -> bool;
    fn record(&mut self, step: TraceStep);
}

impl Recorder for () {
    fn enabled(&self) -> bool {
        false
    }
    fn record(&mut self, _: TraceStep) {}
}

impl Recorder for Trace {
    fn enabled(&self) -> bool {
        true
    }
    fn record(&mut self, step: TraceStep) {
        self.steps.push(step);
    }
}

struct Writer<'a> {
    state: &'a mut EmissionState,
    log: Option<Vec<Change>>,
}

impl<'a> Writer<'a> {
    fn new(state: &'a mut EmissionState, logging: bool) -> Self {
        Self {
            state,
            log: logging.then(Vec::new),
        }
    }

    fn get(&self, axis: Axis, i: usize) -> f64 {
        self.state.get(axis, i)
    }

    fn set(&mut self, axis: Axis, token: usize, new: f64) {
        let old = self.state.get(axis, token);
        if old.to_bits() == new.to_bits() {
            return;
        }
        self.state.set(axis, token, new);
        if let Some(log) = &mut self.log {
            log.push(Change {
                axis,
                token,
                old,
                new,
            });
        }
    }

    fn finish(self, rec: &mut impl Recorder, rule: &str, matched: PatternMatch) {
        if let Some(affected) = self.log {
            rec.record(TraceStep {
                rule: rule.to_string(),
                matched,
                affected,
            });
        }
    }
}

fn of_group(
    matches: &[PatternMatch],
    pred: impl Fn(PatternGroup) -> bool,
) -> impl Iterator<Item = &PatternMatch> {
    matches.iter().filter(move |m| pred(m.group))
}

/// Adds each emotion match's decayed, signed emission to its axis.
pub fn apply_emotion_emissions(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    decay: Decay,
    rec: &mut impl Recorder,
) {
    let n = state.len();
    for m in of_group(matches, |g| matches!(g, PatternGroup::Emotion(_))) {
        let PatternGroup::Emotion(emo) = m.group else {
            unreachable!()
        };
        let (axis, sign, c) = (emo.axis(), emo.sign(), m.center());
        let mut w = Writer::new(state, rec.enabled());
        for i in stops.reach(c, n) {
            let weight = match decay {
                Decay::Distance => distance_weight(i, c),
                Decay::AbsoluteIndex => (-(i as f64)).exp(),
            };
            w.set(axis, i, w.get(axis, i) + sign * weight);
        }
        w.finish(rec, "emotion", *m);
    }
}

fn scale_around(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    group: PatternGroup,
    rec: &mut impl Recorder,
    factor: impl Fn(f64) -> f64,
) {
    let n = state.len();
    for m in of_group(matches, |g| g == group) {
        let c = m.center();
        let mut w = Writer::new(state, rec.enabled());
        for i in stops.reach(c, n).filter(|&i| !m.contains_token(i)) {
            let f = factor(distance_weight(i, c));
            for axis in Axis::ALL {
                w.set(axis, i, w.get(axis, i) * f);
            }
        }
        w.finish(rec, group.keyword(), *m);
    }
}

/// Multiplies emissions around each amplifier by `1 + exp(-|i - c|)`.
pub fn apply_amplifiers(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    rec: &mut impl Recorder,
) {
    scale_around(state, matches, stops, PatternGroup::Amplifier, rec, |d| {
        1.0 + d
    });
}

/// Multiplies emissions around each attenuator by `1 - exp(-|i - c|)`.
pub fn apply_attenuators(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    rec: &mut impl Recorder,
) {
    scale_around(state, matches, stops, PatternGroup::Attenuator, rec, |d| {
        1.0 - d
    });
}

fn negate(w: &mut Writer<'_>, tokens: std::ops::Range<usize>) {
    for i in tokens {
        for axis in Axis::ALL {
            // zero stays +0 so untouched slots never show up as changes
            let v = w.get(axis, i);
            if v != 0.0 {
                w.set(axis, i, -v);
            }
        }
    }
}

/// Negates every axis right of each right-flip match, up to the next stop.
pub fn apply_rightflips(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    rec: &mut impl Recorder,
) {
    let n = state.len();
    for m in of_group(matches, |g| g == PatternGroup::RightFlip) {
        let mut w = Writer::new(state, rec.enabled());
        negate(&mut w, stops.right_of(m.end, n));
        w.finish(rec, "rightflip", *m);
    }
}

/// Negates every axis left of each left-flip match, back to the previous stop.
pub fn apply_leftflips(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    rec: &mut impl Recorder,
) {
    for m in of_group(matches, |g| g == PatternGroup::LeftFlip) {
        let mut w = Writer::new(state, rec.enabled());
        negate(&mut w, stops.left_of(m.start));
        w.finish(rec, "leftflip", *m);
    }
}

/// Carries the emission of the token just left of each continuator onto
/// the tokens right of it, decayed by distance from the continuator center.
pub fn apply_continuators(
    state: &mut EmissionState,
    matches: &[PatternMatch],
    stops: &Stops,
    rec: &mut impl Recorder,
) {
    let n = state.len();
    for m in of_group(matches, |g| g == PatternGroup::Continuator) {
        let carried = match m.start.checked_sub(1) {
            Some(prev) => Axis::ALL.map(|axis| state.get(axis, prev)),
            None => [0.0; 4],
        };
        let c = m.center();
        let mut w = Writer::new(state, rec.enabled());
        for i in stops.right_of(m.end, n) {
            let d = distance_weight(i, c);
            for axis in Axis::ALL {
                w.set(axis, i, w.get(axis, i) + carried[axis.slot()] * d);
            }
        }
        w.finish(rec, "continuator", *m);
    }
}

/// Runs the rule pipeline on already-reduced matches.
pub fn apply_rules(
    len: usize,
    matches: &[PatternMatch],
    config: &EngineConfig,
    rec: &mut impl Recorder,
) -> EmissionState {
    let mut state = EmissionState::new(len);
    let stops = collect_stops(matches);
    apply_emotion_emissions(&mut state, matches, &stops, config.decay, rec);
    apply_amplifiers(&mut state, matches, &stops, rec);
    apply_attenuators(&mut state, matches, &stops, rec);
    apply_rightflips(&mut state, matches, &stops, rec);
    apply_leftflips(&mut state, matches, &stops, rec);
    if config.continuators {
        apply_continuators(&mut state, matches, &stops, rec);
    }
    state
}

/// Matches, reduces and applies every rule in order, recording a trace.
pub fn run_pipeline(
    model: &CompiledModel,
    msg: &[TaggedToken],
    config: &EngineConfig,
) -> (EmissionState, Trace) {
    let matches = max_matches_with(&model.find_matches(msg), config.max_scope);
    let mut trace = Trace::default();
    let state = apply_rules(msg.len(), &matches, config, &mut trace);
    (state, trace)
}

/// Per-axis sums, accumulated in token order.
pub fn axis_scores(state: &EmissionState) -> AxisScores {
    AxisScores::from_array(Axis::ALL.map(|axis| state.row(axis).iter().sum()))
}

/// Strongest of the eight emotion candidates, or neutral when all are zero.
/// Ties go to the emotion declared first.
pub fn classify(scores: &AxisScores) -> EmotionLabel {
    let mut best: Option<(Emotion, f64)> = None;
    for emo in Emotion::ALL {
        let v = scores.candidate(emo);
        if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
            best = Some((emo, v));
        }
    }
    best.map_or(EmotionLabel::Neutral, |(e, _)| EmotionLabel::Emotion(e))
}

/// Feelings formed by two adjacent basic emotions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feeling {
    Love,
    Submission,
    Awe,
    Disapproval,
    Remorse,
    Contempt,
    Aggressiveness,
    Optimism,
}

impl Feeling {
    pub const ALL: [Feeling; 8] = [
        Feeling::Love,
        Feeling::Submission,
        Feeling::Awe,
        Feeling::Disapproval,
        Feeling::Remorse,
        Feeling::Contempt,
        Feeling::Aggressiveness,
        Feeling::Optimism,
    ];

    pub fn components(self) -> (Emotion, Emotion) {
        use Emotion::*;
        match self {
            Feeling::Love => (Joy, Trust),
            Feeling::Submission => (Trust, Fear),
            Feeling::Awe => (Fear, Surprise),
            Feeling::Disapproval => (Surprise, Sadness),
            Feeling::Remorse => (Sadness, Disgust),
            Feeling::Contempt => (Disgust, Anger),
            Feeling::Aggressiveness => (Anger, Anticipation),
            Feeling::Optimism => (Anticipation, Joy),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Feeling::Love => "love",
            Feeling::Submission => "submission",
            Feeling::Awe => "awe",
            Feeling::Disapproval => "disapproval",
            Feeling::Remorse => "remorse",
            Feeling::Contempt => "contempt",
            Feeling::Aggressiveness => "aggressiveness",
            Feeling::Optimism => "optimism",
        }
    }
}

/// Nonzero dyad strengths: the weaker of the two component candidates.
pub fn derive_feelings(scores: &AxisScores) -> Vec<(Feeling, f64)> {
    Feeling::ALL
        .into_iter()
        .filter_map(|f| {
            let (a, b) = f.components();
            let v = scores.candidate(a).min(scores.candidate(b));
            (v > 0.0).then_some((f, v))
        })
        .collect()
}

/// Outcome of classifying one message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub scores: AxisScores,
    pub label: EmotionLabel,
}

/// Everything `explain` shows about one message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Explanation {
    pub tokens: Vec<TaggedToken>,
    pub matches: Vec<PatternMatch>,
    pub stops: Stops,
    pub trace: Trace,
    pub state: EmissionState,
    pub scores: AxisScores,
    pub label: EmotionLabel,
    pub feelings: Vec<(Feeling, f64)>,
}

/// A compiled model plus rule configuration.
#[derive(Debug, Clone)]
pub struct Engine {
    model: CompiledModel,
    config: EngineConfig,
}

impl Engine {
    pub fn new(model: CompiledModel, config: EngineConfig) -> Self {
        Self { model, config }
    }

    pub fn model(&self) -> &CompiledModel {
        &self.model
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn emissions(&self, msg: &[TaggedToken]) -> EmissionState {
        let matches = max_matches_with(&self.model.find_matches(msg), self.config.max_scope);
        apply_rules(msg.len(), &matches, &self.config, &mut ())
    }

    pub fn analyze(&self, msg: &[TaggedToken]) -> Analysis {
        let scores = axis_scores(&self.emissions(msg));
        Analysis {
            label: classify(&scores),
            scores,
        }
    }

    pub fn explain(&self, msg: &[TaggedToken]) -> Explanation {
        let matches = max_matches_with(&self.model.find_matches(msg), self.config.max_scope);
        let mut trace = Trace::default();
        let state = apply_rules(msg.len(), &matches, &self.config, &mut trace);
        let scores = axis_scores(&state);
        Explanation {
            tokens: msg.to_vec(),
            stops: collect_stops(&matches),
            matches,
            trace,
            state,
            label: classify(&scores),
            feelings: derive_feelings(&scores),
            scores,
        }
    }

    /// Classifies messages in parallel on the current rayon pool; output
    /// order follows input order.
    pub fn analyze_batch<M>(&self, msgs: &[M]) -> Vec<Analysis>
    where
        M: AsRef<[TaggedToken]> + Sync,
    {
        msgs.par_iter().map(|m| self.analyze(m.as_ref())).collect()
    }
}
