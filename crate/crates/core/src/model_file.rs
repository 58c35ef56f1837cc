//! Text format for pattern models.
//!
//! One entry per line: `group<TAB>elements`. Elements are space separated:
//!
//! | item        | meaning                                  |
//! |-------------|------------------------------------------|
//! | `word`      | the word, any tag                        |
//! | `word/TAG`  | the word with exactly that tag           |
//! | `word/*`    | the word, any tag (for words with `/`)   |
//! | `*/TAG`     | any one word with that tag               |
//! | `_`         | any one token                            |
//! | `*`         | zero or more tokens                      |
//!
//! Surfaces are lowercased on load. Blank lines and `#` comments are skipped.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{ModelError, ModelLineError};
use crate::model::{Pattern, PatternElement, PatternGroup, TagConstraint};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedModel {
    pub patterns: Vec<Pattern>,
    pub warnings: Vec<String>,
}

impl ParsedModel {
    /// `(group, count)` in order of first appearance.
    pub fn group_counts(&self) -> Vec<(PatternGroup, usize)> {
        let mut counts: Vec<(PatternGroup, usize)> = Vec::new();
        for p in &self.patterns {
            match counts.iter_mut().find(|(g, _)| *g == p.group) {
                Some((_, n)) => *n += 1,
                None => counts.push((p.group, 1)),
            }
        }
        counts
    }
}

fn parse_element(item: &str) -> Result<PatternElement, String> {
    match item {
        "*" => return Ok(PatternElement::Gap),
        "_" => return Ok(PatternElement::any_one()),
        _ => {}
    }
    let (word, tag) = match item.rsplit_once('/') {
        Some((w, "*")) if !w.is_empty() => (w, TagConstraint::Any),
        Some((w, t)) if !w.is_empty() && !t.is_empty() && !t.chars().any(char::is_lowercase) => {
            (w, TagConstraint::Exactly(t.to_string()))
        }
        _ => (item, TagConstraint::Any),
    };
    match word {
        "*" | "_" => match tag {
            TagConstraint::Exactly(_) => Ok(PatternElement::AnyOne { tag }),
            TagConstraint::Any => Ok(PatternElement::any_one()),
        },
        w => Ok(PatternElement::Literal {
            surface: w.to_lowercase(),
            tag,
        }),
    }
}

fn parse_line(row: &str) -> Result<Pattern, String> {
    let (group, elements) = row
        .split_once('\t')
        .ok_or_else(|| "expected `group<TAB>elements`".to_string())?;
    let group: PatternGroup = group.trim().parse()?;
    let elements = elements
        .split_whitespace()
        .map(parse_element)
        .collect::<Result<Vec<_>, _>>()?;
    Pattern::new(elements, group).map_err(|e| e.to_string())
}

/// Parses a model, reporting every invalid line at once.
pub fn parse_model_str(input: &str) -> Result<ParsedModel, Vec<ModelLineError>> {
    let mut model = ParsedModel::default();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let row = raw.strip_suffix('\r').unwrap_or(raw);
        if row.trim().is_empty() || row.trim_start().starts_with('#') {
            continue;
        }
        match parse_line(row) {
            Ok(p) => {
                if seen.insert(p.clone()) {
                    model.patterns.push(p);
                } else {
                    model
                        .warnings
                        .push(format!("line {line}: duplicate entry ignored: `{row}`"));
                }
            }
            Err(reason) => errors.push(ModelLineError {
                line,
                reason,
                text: row.to_string(),
            }),
        }
    }
    if !errors.is_empty() {
        return Err(errors);
    }
    if model.patterns.is_empty() {
        model
            .warnings
            .push("model contains no patterns".to_string());
    }
    Ok(model)
}

pub fn parse_model(path: impl AsRef<Path>) -> Result<ParsedModel, ModelError> {
    let text = fs::read_to_string(path)?;
    parse_model_str(&text).map_err(ModelError::Invalid)
}

fn format_element(el: &PatternElement) -> String {
    match el {
        PatternElement::Gap => "*".to_string(),
        PatternElement::AnyOne {
            tag: TagConstraint::Any,
        } => "_".to_string(),
        PatternElement::AnyOne {
            tag: TagConstraint::Exactly(t),
        } => format!("*/{t}"),
        PatternElement::Literal { surface, tag } => match tag {
            TagConstraint::Exactly(t) => format!("{surface}/{t}"),
            TagConstraint::Any if surface.contains('/') || surface == "*" || surface == "_" => {
                format!("{surface}/*")
            }
            TagConstraint::Any => surface.clone(),
        },
    }
}

/// Inverse of [`parse_model_str`] for valid patterns.
pub fn serialize_model(patterns: &[Pattern]) -> String {
    let mut out = String::new();
    for p in patterns {
        let items: Vec<String> = p.elements.iter().map(format_element).collect();
        out.push_str(p.group.keyword());
        out.push('\t');
        out.push_str(&items.join(" "));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Emotion;

    #[test]
    fn example_entries() {
        let m = parse_model_str("sadness\tdisappointment\namplifier\thuge _\n").unwrap();
        assert_eq!(
            m.patterns[0],
            Pattern::new(
                vec![PatternElement::literal("disappointment")],
                PatternGroup::Emotion(Emotion::Sadness)
            )
            .unwrap()
        );
        assert_eq!(
            m.patterns[1].elements,
            vec![PatternElement::literal("huge"), PatternElement::any_one()]
        );
    }

    #[test]
    fn element_forms() {
        let m = parse_model_str("joy\tGood/JJ */NN and/or 1/2/* * x\n").unwrap();
        assert_eq!(
            m.patterns[0].elements,
            vec![
                PatternElement::tagged("good", "JJ"),
                PatternElement::AnyOne {
                    tag: TagConstraint::Exactly("NN".into())
                },
                PatternElement::literal("and/or"),
                PatternElement::literal("1/2"),
                PatternElement::Gap,
                PatternElement::literal("x"),
            ]
        );
        let again = parse_model_str(&serialize_model(&m.patterns)).unwrap();
        assert_eq!(again.patterns, m.patterns);
    }

    #[test]
    fn reports_every_bad_line() {
        let errs = parse_model_str("anticipation\t* like\njoy\tok\nglee\tyay\nstop\n").unwrap_err();
        let lines: Vec<usize> = errs.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![1, 3, 4]);
        assert!(errs[0].text.contains("* like"));
    }

    #[test]
    fn duplicates_and_empty() {
        let m = parse_model_str("joy\tyay\n# c\n\njoy\tYAY\n").unwrap();
        assert_eq!(m.patterns.len(), 1);
        assert_eq!(m.warnings.len(), 1);
        let m = parse_model_str("").unwrap();
        assert!(m.patterns.is_empty());
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn counts_in_first_seen_order() {
        let m =
            parse_model_str("anticipation\tI * like\nleftflip\tbut\njoy\ta\nleftflip\thowever\n")
                .unwrap();
        let counts: Vec<(String, usize)> = m
            .group_counts()
            .into_iter()
            .map(|(g, n)| (g.to_string(), n))
            .collect();
        assert_eq!(
            counts,
            vec![
                ("anticipation".into(), 1),
                ("leftflip".into(), 2),
                ("joy".into(), 1)
            ]
        );
    }
}
