//! Domain types shared across the engine: tokens, emotions, axes, pattern
//! groups, patterns and the per-token emission state.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::PatternError;

/// POS tag assigned to tokens whose tag is unknown.
pub const UNKNOWN_TAG: &str = "X";
/// POS tag assigned to split-off punctuation marks.
pub const PUNCT_TAG: &str = "PUNCT";

/// One surface token plus its part-of-speech tag.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TaggedToken {
    pub surface: String,
    pub tag: String,
}

impl TaggedToken {
    pub fn new(surface: impl Into<String>, tag: impl Into<String>) -> Self {
        Self {
            surface: surface.into(),
            tag: tag.into(),
        }
    }

    /// Token with the unknown tag.
    pub fn untagged(surface: impl Into<String>) -> Self {
        Self::new(surface, UNKNOWN_TAG)
    }

    pub fn is_valid(&self) -> bool {
        !self.surface.is_empty()
            && !self.surface.chars().any(char::is_whitespace)
            && !self.tag.is_empty()
    }
}

/// One of the four opposing emotion axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Axis {
    JoySadness,
    TrustDisgust,
    FearAnger,
    SurpriseAnticipation,
}

impl Axis {
    pub const ALL: [Axis; 4] = [
        Axis::JoySadness,
        Axis::TrustDisgust,
        Axis::FearAnger,
        Axis::SurpriseAnticipation,
    ];

    /// 1-based axis number (1 = Joy/Sadness ... 4 = Surprise/Anticipation).
    pub fn number(self) -> u8 {
        self.slot() as u8 + 1
    }

    /// 0-based row into an [`EmissionState`].
    pub fn slot(self) -> usize {
        match self {
            Axis::JoySadness => 0,
            Axis::TrustDisgust => 1,
            Axis::FearAnger => 2,
            Axis::SurpriseAnticipation => 3,
        }
    }

    pub fn from_number(n: u8) -> Option<Axis> {
        Axis::ALL.get((n as usize).checked_sub(1)?).copied()
    }

    pub fn positive_pole(self) -> Emotion {
        match self {
            Axis::JoySadness => Emotion::Joy,
            Axis::TrustDisgust => Emotion::Trust,
            Axis::FearAnger => Emotion::Fear,
            Axis::SurpriseAnticipation => Emotion::Surprise,
        }
    }

    pub fn negative_pole(self) -> Emotion {
        match self {
            Axis::JoySadness => Emotion::Sadness,
            Axis::TrustDisgust => Emotion::Disgust,
            Axis::FearAnger => Emotion::Anger,
            Axis::SurpriseAnticipation => Emotion::Anticipation,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::JoySadness => "joy_sadness",
            Axis::TrustDisgust => "trust_disgust",
            Axis::FearAnger => "fear_anger",
            Axis::SurpriseAnticipation => "surprise_anticipation",
        }
    }
}

/// The eight basic emotions of the wheel.
///
/// Declaration order is the fixed tie-breaking order used by
/// [`classify`](crate::engine::classify).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Emotion {
    Joy,
    Sadness,
    Trust,
    Disgust,
    Fear,
    Anger,
    Surprise,
    Anticipation,
}

impl Emotion {
    pub const ALL: [Emotion; 8] = [
        Emotion::Joy,
        Emotion::Sadness,
        Emotion::Trust,
        Emotion::Disgust,
        Emotion::Fear,
        Emotion::Anger,
        Emotion::Surprise,
        Emotion::Anticipation,
    ];

    pub fn axis(self) -> Axis {
        match self {
            Emotion::Joy | Emotion::Sadness => Axis::JoySadness,
            Emotion::Trust | Emotion::Disgust => Axis::TrustDisgust,
            Emotion::Fear | Emotion::Anger => Axis::FearAnger,
            Emotion::Surprise | Emotion::Anticipation => Axis::SurpriseAnticipation,
        }
    }

    /// Axis number the emotion emits on, in `1..=4`.
    pub fn esc(self) -> u8 {
        self.axis().number()
    }

    /// +1 for the positive pole of its axis, -1 for the negative pole.
    pub fn sign(self) -> f64 {
        match self {
            Emotion::Joy | Emotion::Trust | Emotion::Fear | Emotion::Surprise => 1.0,
            Emotion::Sadness | Emotion::Disgust | Emotion::Anger | Emotion::Anticipation => -1.0,
        }
    }

    pub fn opposite(self) -> Emotion {
        let axis = self.axis();
        if self == axis.positive_pole() {
            axis.negative_pole()
        } else {
            axis.positive_pole()
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Emotion::Joy => "joy",
            Emotion::Sadness => "sadness",
            Emotion::Trust => "trust",
            Emotion::Disgust => "disgust",
            Emotion::Fear => "fear",
            Emotion::Anger => "anger",
            Emotion::Surprise => "surprise",
            Emotion::Anticipation => "anticipation",
        }
    }
}

impl fmt::Display for Emotion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emotion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Emotion::ALL
            .into_iter()
            .find(|e| e.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown emotion `{s}`"))
    }
}

/// Row of the static emotion table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmotionEntry {
    pub emotion: Emotion,
    pub esc: u8,
    pub sign: f64,
}

/// All eight emotions with their axis number and sign.
pub fn emotion_table() -> Vec<EmotionEntry> {
    Emotion::ALL
        .into_iter()
        .map(|emotion| EmotionEntry {
            emotion,
            esc: emotion.esc(),
            sign: emotion.sign(),
        })
        .collect()
}

/// Final label of a message: one emotion, or neutral when nothing was expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmotionLabel {
    Emotion(Emotion),
    Neutral,
}

impl EmotionLabel {
    pub fn name(self) -> &'static str {
        match self {
            EmotionLabel::Emotion(e) => e.name(),
            EmotionLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for EmotionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EmotionLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("neutral") {
            Ok(EmotionLabel::Neutral)
        } else {
            s.parse().map(EmotionLabel::Emotion)
        }
    }
}

impl From<Emotion> for EmotionLabel {
    fn from(e: Emotion) -> Self {
        EmotionLabel::Emotion(e)
    }
}

/// Role of a pattern: one emotion emitter or one of the six modifier rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PatternGroup {
    Emotion(Emotion),
    Amplifier,
    Attenuator,
    RightFlip,
    LeftFlip,
    Continuator,
    Stop,
}

impl PatternGroup {
    pub fn all() -> Vec<PatternGroup> {
        Emotion::ALL
            .into_iter()
            .map(PatternGroup::Emotion)
            .chain([
                PatternGroup::Amplifier,
                PatternGroup::Attenuator,
                PatternGroup::RightFlip,
                PatternGroup::LeftFlip,
                PatternGroup::Continuator,
                PatternGroup::Stop,
            ])
            .collect()
    }

    /// Keyword used in model files.
    pub fn keyword(self) -> &'static str {
        match self {
            PatternGroup::Emotion(e) => e.name(),
            PatternGroup::Amplifier => "amplifier",
            PatternGroup::Attenuator => "attenuator",
            PatternGroup::RightFlip => "rightflip",
            PatternGroup::LeftFlip => "leftflip",
            PatternGroup::Continuator => "continuator",
            PatternGroup::Stop => "stop",
        }
    }
}

impl fmt::Display for PatternGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl FromStr for PatternGroup {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternGroup::all()
            .into_iter()
            .find(|g| g.keyword() == s)
            .ok_or_else(|| format!("unknown pattern group `{s}`"))
    }
}

/// Tag constraint of a single-token pattern element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TagConstraint {
    Any,
    Exactly(String),
}

impl TagConstraint {
    pub fn accepts(&self, tag: &str) -> bool {
        match self {
            TagConstraint::Any => true,
            TagConstraint::Exactly(t) => t == tag,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PatternElement {
    /// One token whose lowercased surface equals `surface`.
    Literal { surface: String, tag: TagConstraint },
    /// Exactly one token of any surface (`_`, or `*/TAG` with a tag).
    AnyOne { tag: TagConstraint },
    /// Zero or more tokens.
    Gap,
}

impl PatternElement {
    pub fn literal(surface: &str) -> Self {
        PatternElement::Literal {
            surface: surface.to_lowercase(),
            tag: TagConstraint::Any,
        }
    }

    pub fn tagged(surface: &str, tag: &str) -> Self {
        PatternElement::Literal {
            surface: surface.to_lowercase(),
            tag: TagConstraint::Exactly(tag.to_string()),
        }
    }

    pub fn any_one() -> Self {
        PatternElement::AnyOne {
            tag: TagConstraint::Any,
        }
    }

    /// Does this single-token element accept the token? `lowered` is the
    /// lowercased surface. Always false for [`PatternElement::Gap`].
    pub fn accepts(&self, lowered: &str, tag: &str) -> bool {
        match self {
            PatternElement::Literal { surface, tag: tc } => surface == lowered && tc.accepts(tag),
            PatternElement::AnyOne { tag: tc } => tc.accepts(tag),
            PatternElement::Gap => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern {
    pub elements: Vec<PatternElement>,
    pub group: PatternGroup,
}

impl Pattern {
    /// Builds a pattern, checking the element invariants.
    pub fn new(elements: Vec<PatternElement>, group: PatternGroup) -> Result<Self, PatternError> {
        let pattern = Pattern { elements, group };
        pattern.validate()?;
        Ok(pattern)
    }

    pub fn validate(&self) -> Result<(), PatternError> {
        let (first, last) = match (self.elements.first(), self.elements.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(PatternError::Empty),
        };
        if *first == PatternElement::Gap {
            return Err(PatternError::LeadingGap);
        }
        if *last == PatternElement::Gap {
            return Err(PatternError::TrailingGap);
        }
        for el in &self.elements {
            match el {
                PatternElement::Literal { surface, tag } => {
                    if surface.is_empty() || surface.chars().any(char::is_whitespace) {
                        return Err(PatternError::BadSurface(surface.clone()));
                    }
                    if *surface != surface.to_lowercase() {
                        return Err(PatternError::NotLowercase(surface.clone()));
                    }
                    check_tag(tag)?;
                }
                PatternElement::AnyOne { tag } => check_tag(tag)?,
                PatternElement::Gap => {}
            }
        }
        Ok(())
    }
}

fn check_tag(tag: &TagConstraint) -> Result<(), PatternError> {
    match tag {
        TagConstraint::Exactly(t) if t.is_empty() || t.chars().any(char::is_whitespace) => {
            Err(PatternError::BadTag(t.clone()))
        }
        _ => Ok(()),
    }
}

/// A pattern occurrence over tokens `start..=end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PatternMatch {
    pub start: usize,
    pub end: usize,
    pub group: PatternGroup,
    pub pattern_id: usize,
}

impl PatternMatch {
    /// Floor midpoint of the span.
    pub fn center(&self) -> usize {
        center(self.start, self.end)
    }

    pub fn contains_token(&self, i: usize) -> bool {
        self.start <= i && i <= self.end
    }

    /// True if `other`'s span lies inside this one and differs from it.
    pub fn strictly_contains(&self, other: &PatternMatch) -> bool {
        self.start <= other.start
            && other.end <= self.end
            && (self.start, self.end) != (other.start, other.end)
    }
}

pub fn center(start: usize, end: usize) -> usize {
    start + (end - start) / 2
}

/// Per-token emissions on the four axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmissionState {
    rows: [Vec<f64>; 4],
}

impl EmissionState {
    pub fn new(len: usize) -> Self {
        Self {
            rows: std::array::from_fn(|_| vec![0.0; len]),
        }
    }

    pub fn len(&self) -> usize {
        self.rows[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn row(&self, axis: Axis) -> &[f64] {
        &self.rows[axis.slot()]
    }

    pub fn row_mut(&mut self, axis: Axis) -> &mut [f64] {
        &mut self.rows[axis.slot()]
    }

    pub fn get(&self, axis: Axis, i: usize) -> f64 {
        self.rows[axis.slot()][i]
    }

    pub fn set(&mut self, axis: Axis, i: usize, v: f64) {
        self.rows[axis.slot()][i] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|v| v.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(|&v| v == 0.0)
    }
}

/// Summed emissions per axis.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AxisScores {
    pub joy_sadness: f64,
    pub trust_disgust: f64,
    pub fear_anger: f64,
    pub surprise_anticipation: f64,
}

impl AxisScores {
    pub fn get(&self, axis: Axis) -> f64 {
        match axis {
            Axis::JoySadness => self.joy_sadness,
            Axis::TrustDisgust => self.trust_disgust,
            Axis::FearAnger => self.fear_anger,
            Axis::SurpriseAnticipation => self.surprise_anticipation,
        }
    }

    pub fn from_array(v: [f64; 4]) -> Self {
        Self {
            joy_sadness: v[0],
            trust_disgust: v[1],
            fear_anger: v[2],
            surprise_anticipation: v[3],
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [
            self.joy_sadness,
            self.trust_disgust,
            self.fear_anger,
            self.surprise_anticipation,
        ]
    }

    /// Non-negative strength of one emotion: the positive part of its axis
    /// score for positive poles, the negated negative part otherwise.
    pub fn candidate(&self, emotion: Emotion) -> f64 {
        let v = self.get(emotion.axis()) * emotion.sign();
        if v > 0.0 {
            v
        } else {
            0.0
        }
    }
}
