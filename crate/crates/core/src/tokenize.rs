//! Whitespace tokenizer with punctuation splitting and `surface/TAG` input.

use crate::model::{TaggedToken, PUNCT_TAG, UNKNOWN_TAG};

const SPLIT_MARKS: &[char] = &['.', ',', '!', '?', ';', ':'];

/// Splits `text` into tagged tokens.
///
/// Whitespace-separated chunks of the form `surface/TAG` keep their tag
/// verbatim. Other chunks lose leading and trailing `.,!?;:` marks, each of
/// which becomes its own `PUNCT` token; the remainder is tagged `X`.
pub fn tokenize(text: &str) -> Vec<TaggedToken> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        if let Some((surface, tag)) = split_tagged(chunk) {
            out.push(TaggedToken::new(surface, tag));
            continue;
        }
        let core_start = chunk
            .char_indices()
            .find(|(_, c)| !SPLIT_MARKS.contains(c))
            .map(|(i, _)| i)
            .unwrap_or(chunk.len());
        let core_end = chunk
            .char_indices()
            .rev()
            .find(|(_, c)| !SPLIT_MARKS.contains(c))
            .map(|(i, c)| i + c.len_utf8())
            .unwrap_or(core_start)
            .max(core_start);

        push_marks(&mut out, &chunk[..core_start]);
        if core_start < core_end {
            out.push(TaggedToken::new(&chunk[core_start..core_end], UNKNOWN_TAG));
        }
        push_marks(&mut out, &chunk[core_end..]);
    }
    out
}

fn push_marks(out: &mut Vec<TaggedToken>, marks: &str) {
    out.extend(
        marks
            .chars()
            .map(|c| TaggedToken::new(c.to_string(), PUNCT_TAG)),
    );
}

/// `good/JJ` -> ("good", "JJ"). Tags may not contain lowercase letters, so
/// `and/or` or URLs stay plain words.
fn split_tagged(chunk: &str) -> Option<(&str, &str)> {
    let (surface, tag) = chunk.rsplit_once('/')?;
    let tag_ok = !tag.is_empty() && !tag.chars().any(char::is_lowercase);
    (tag_ok && !surface.is_empty()).then_some((surface, tag))
}
