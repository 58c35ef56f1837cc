//! Corpus loaders for the Affect and Twitter TSV formats, annotator agreement
//! and neutral filtering, and seeded train/test splitting.
//!
//! Affect rows: `id<TAB>emoA<TAB>moodA<TAB>emoB<TAB>moodB<TAB>text`, labels from
//! the Ekman set. Twitter rows: `lang<TAB>label<TAB>text`. Both are UTF-8, LF,
//! headerless; `#` lines are comments and tabs inside text are written `\t`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::DatasetError;
use crate::model::{EmotionLabel, TaggedToken};
use crate::tokenize::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EkmanLabel {
    Angry,
    Disgusted,
    Fearful,
    Happy,
    Sad,
    Surprised,
    Neutral,
}

impl EkmanLabel {
    pub const ALL: [EkmanLabel; 7] = [
        EkmanLabel::Angry,
        EkmanLabel::Disgusted,
        EkmanLabel::Fearful,
        EkmanLabel::Happy,
        EkmanLabel::Sad,
        EkmanLabel::Surprised,
        EkmanLabel::Neutral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EkmanLabel::Angry => "angry",
            EkmanLabel::Disgusted => "disgusted",
            EkmanLabel::Fearful => "fearful",
            EkmanLabel::Happy => "happy",
            EkmanLabel::Sad => "sad",
            EkmanLabel::Surprised => "surprised",
            EkmanLabel::Neutral => "neutral",
        }
    }
}

impl FromStr for EkmanLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EkmanLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown Ekman label `{s}`"))
    }
}

impl fmt::Display for EkmanLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Gold label of an example, in the taxonomy of its corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GoldLabel {
    Plutchik(EmotionLabel),
    Ekman(EkmanLabel),
}

impl GoldLabel {
    pub fn name(self) -> &'static str {
        match self {
            GoldLabel::Plutchik(l) => l.name(),
            GoldLabel::Ekman(l) => l.name(),
        }
    }

    pub fn is_neutral(self) -> bool {
        matches!(
            self,
            GoldLabel::Plutchik(EmotionLabel::Neutral) | GoldLabel::Ekman(EkmanLabel::Neutral)
        )
    }
}

impl fmt::Display for GoldLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    En,
    Nl,
    De,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::Nl, Language::En, Language::De];

    pub fn code(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Nl => "nl",
            Language::De => "de",
        }
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "en" => Ok(Language::En),
            "nl" => Ok(Language::Nl),
            "de" => Ok(Language::De),
            _ => Err(s.to_string()),
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub id: String,
    pub text: String,
    pub tokens: Vec<TaggedToken>,
    pub label: GoldLabel,
    pub language: Option<Language>,
    /// Both annotators' emotion labels (Affect only).
    pub annotations: Option<[EkmanLabel; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub seed: u64,
    pub include_neutral: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: 2.0 / 3.0,
            seed: 1,
            include_neutral: true,
        }
    }
}

pub fn unescape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            Some(other) => {
                out.push('\\');
                out.push(other);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out
}

/// Non-comment, non-blank lines with their 1-based line numbers.
fn data_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
}

fn parse_err(line: usize, reason: impl Into<String>) -> DatasetError {
    DatasetError::Parse {
        line,
        reason: reason.into(),
    }
}

pub fn parse_affect(input: &str) -> Result<Vec<LabeledExample>, DatasetError> {
    let mut out = Vec::new();
    for (line, row) in data_lines(input) {
        let fields: Vec<&str> = row.splitn(6, '\t').collect();
        let [id, emo_a, mood_a, emo_b, mood_b, text] = fields[..] else {
            return Err(parse_err(
                line,
                format!("expected 6 fields, got {}", fields.len()),
            ));
        };
        if id.is_empty() {
            return Err(parse_err(line, "empty id"));
        }
        let a: EkmanLabel = emo_a.parse().map_err(|e| parse_err(line, e))?;
        let b: EkmanLabel = emo_b.parse().map_err(|e| parse_err(line, e))?;
        // moods are read for validation only
        if mood_a.is_empty() || mood_b.is_empty() {
            return Err(parse_err(line, "empty mood field"));
        }
        let text = unescape_field(text);
        out.push(LabeledExample {
            id: id.to_string(),
            tokens: tokenize(&text),
            text,
            label: GoldLabel::Ekman(a),
            language: None,
            annotations: Some([a, b]),
        });
    }
    Ok(out)
}

pub fn load_affect(path: impl AsRef<Path>) -> Result<Vec<LabeledExample>, DatasetError> {
    parse_affect(&fs::read_to_string(path)?)
}

/// Writes examples back in Affect format. Mood columns are written as `-`.
pub fn serialize_affect(examples: &[LabeledExample]) -> String {
    let mut out = String::new();
    for ex in examples {
        let [a, b] = ex.annotations.unwrap_or(match ex.label {
            GoldLabel::Ekman(l) => [l, l],
            GoldLabel::Plutchik(_) => [EkmanLabel::Neutral; 2],
        });
        out.push_str(&format!(
            "{}\t{a}\t-\t{b}\t-\t{}\n",
            ex.id,
            escape_field(&ex.text)
        ));
    }
    out
}

pub fn parse_twitter(input: &str) -> Result<Vec<LabeledExample>, DatasetError> {
    let mut out = Vec::new();
    for (line, row) in data_lines(input) {
        let fields: Vec<&str> = row.splitn(3, '\t').collect();
        let [lang, label, text] = fields[..] else {
            return Err(parse_err(
                line,
                format!("expected 3 fields, got {}", fields.len()),
            ));
        };
        let language: Language = lang
            .parse()
            .map_err(|code| DatasetError::UnknownLanguage { line, code })?;
        if label != label.to_lowercase() {
            return Err(parse_err(line, format!("label `{label}` is not lowercase")));
        }
        let label: EmotionLabel = label.parse().map_err(|e| parse_err(line, e))?;
        let text = unescape_field(text);
        out.push(LabeledExample {
            id: (out.len() + 1).to_string(),
            tokens: tokenize(&text),
            text,
            label: GoldLabel::Plutchik(label),
            language: Some(language),
            annotations: None,
        });
    }
    Ok(out)
}

pub fn load_twitter(path: impl AsRef<Path>) -> Result<Vec<LabeledExample>, DatasetError> {
    parse_twitter(&fs::read_to_string(path)?)
}

pub fn serialize_twitter(examples: &[LabeledExample]) -> String {
    let mut out = String::new();
    for ex in examples {
        let lang = ex.language.map_or("en", Language::code);
        out.push_str(&format!(
            "{lang}\t{}\t{}\n",
            ex.label,
            escape_field(&ex.text)
        ));
    }
    out
}

/// Keeps examples whose annotators agree, labelled with the agreed value.
/// Examples without annotator labels pass through.
pub fn agreement_filter(examples: Vec<LabeledExample>) -> Vec<LabeledExample> {
    examples
        .into_iter()
        .filter_map(|mut ex| match ex.annotations {
            Some([a, b]) if a == b => {
                ex.label = GoldLabel::Ekman(a);
                Some(ex)
            }
            Some(_) => None,
            None => Some(ex),
        })
        .collect()
}

pub fn filter_neutral(examples: Vec<LabeledExample>, include: bool) -> Vec<LabeledExample> {
    if include {
        return examples;
    }
    examples
        .into_iter()
        .filter(|ex| !ex.label.is_neutral())
        .collect()
}

/// Number of training examples for `n` items: `ceil(n * fraction)`, with
/// products within 1e-9 of an integer treated as that integer.
pub fn train_size(n: usize, fraction: f64) -> usize {
    let x = n as f64 * fraction;
    let k = if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x.ceil()
    };
    (k.max(0.0) as usize).min(n)
}

/// Seeded shuffle, then the first `train_size` items go to training. Both
/// halves keep the input order.
pub fn split<T: Clone>(items: &[T], config: &SplitConfig) -> (Vec<T>, Vec<T>) {
    let mut order: Vec<usize> = (0..items.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    order.shuffle(&mut rng);
    let k = train_size(items.len(), config.train_fraction);
    let (train_idx, test_idx) = order.split_at_mut(k);
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    (
        train_idx.iter().map(|&i| items[i].clone()).collect(),
        test_idx.iter().map(|&i| items[i].clone()).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Emotion;

    const AFFECT: &str = "\
# id\temoA\tmoodA\temoB\tmoodB\ttext
s1\thappy\thappy\thappy\tneutral\tWhat a lovely day!
s2\thappy\thappy\tsad\tsad\tShe wept with joy.
s3\tneutral\tneutral\tneutral\tneutral\tThe door opened.
";

    #[test]
    fn affect_agreement() {
        let ex = parse_affect(AFFECT).unwrap();
        assert_eq!(ex.len(), 3);
        let kept = agreement_filter(ex);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].label, GoldLabel::Ekman(EkmanLabel::Happy));
        assert_eq!(kept[0].tokens.last().unwrap().surface, "!");
        assert!(agreement_filter(vec![]).is_empty());
        let no_neutral = filter_neutral(kept.clone(), false);
        assert_eq!(no_neutral.len(), 1);
        assert_eq!(filter_neutral(kept.clone(), true), kept);
    }

    #[test]
    fn affect_errors() {
        assert!(parse_affect("").unwrap().is_empty());
        let err = parse_affect("s1\thappy\thappy\tglad\tsad\ttext\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 1, .. }));
        let err = parse_affect("# c\ns1\thappy\n").unwrap_err();
        assert!(matches!(err, DatasetError::Parse { line: 2, .. }));
    }

    #[test]
    fn twitter_rows() {
        let ex = parse_twitter("en\tjoy\tI love this\n").unwrap();
        assert_eq!(ex[0].language, Some(Language::En));
        assert_eq!(ex[0].label, GoldLabel::Plutchik(Emotion::Joy.into()));
        assert_eq!(ex[0].tokens.len(), 3);
        assert!(matches!(
            parse_twitter("en\tecstasy\thi\n"),
            Err(DatasetError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_twitter("fr\tjoy\tsalut\n"),
            Err(DatasetError::UnknownLanguage { line: 1, .. })
        ));
        let ex = parse_twitter("nl\tneutral\ta\\tb\n").unwrap();
        assert_eq!(ex[0].text, "a\tb");
        assert_eq!(ex[0].label, GoldLabel::Plutchik(EmotionLabel::Neutral));
    }

    #[test]
    fn escaping_round_trips() {
        for s in [
            "plain",
            "tab\there",
            "back\\slash",
            "\\t literal",
            "nl\nx",
            "end\\",
        ] {
            assert_eq!(unescape_field(&escape_field(s)), s);
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let items: Vec<usize> = (0..9).collect();
        let cfg = SplitConfig::default();
        let (train, test) = split(&items, &cfg);
        assert_eq!((train.len(), test.len()), (6, 3));
        assert_eq!(split(&items, &cfg), (train.clone(), test.clone()));
        let mut all: Vec<usize> = train.into_iter().chain(test).collect();
        all.sort_unstable();
        assert_eq!(all, items);
        let (a, b) = split::<usize>(&[], &cfg);
        assert!(a.is_empty() && b.is_empty());
    }

    #[test]
    fn train_size_rounding() {
        assert_eq!(train_size(9, 2.0 / 3.0), 6);
        assert_eq!(train_size(10, 2.0 / 3.0), 7);
        assert_eq!(train_size(3, 2.0 / 3.0), 2);
        assert_eq!(train_size(0, 0.5), 0);
    }
}
