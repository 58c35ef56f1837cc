//! Wildcard pattern matching over token streams and reduction to the
//! maximal-match set.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::CompileError;
use crate::model::{Pattern, PatternElement, PatternGroup, PatternMatch, TaggedToken};

/// Which matches compete when dropping contained spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxScope {
    /// A match is dropped only when a match of the same group contains it.
    #[default]
    Group,
    /// A match is dropped when any match contains it.
    Global,
}

/// Patterns indexed by their first element.
#[derive(Debug, Clone, Default)]
pub struct CompiledModel {
    patterns: Vec<Pattern>,
    by_first_literal: HashMap<String, Vec<usize>>,
    // Patterns starting with a single-token wildcard; tried at every offset.
    unanchored: Vec<usize>,
}

impl CompiledModel {
    pub fn compile(patterns: Vec<Pattern>) -> Result<Self, CompileError> {
        let mut by_first_literal: HashMap<String, Vec<usize>> = HashMap::new();
        let mut unanchored = Vec::new();
        for (index, p) in patterns.iter().enumerate() {
            p.validate()
                .map_err(|source| CompileError { index, source })?;
            match &p.elements[0] {
                PatternElement::Literal { surface, .. } => by_first_literal
                    .entry(surface.clone())
                    .or_default()
                    .push(index),
                PatternElement::AnyOne { .. } => unanchored.push(index),
                PatternElement::Gap => unreachable!("validated"),
            }
        }
        Ok(Self {
            patterns,
            by_first_literal,
            unanchored,
        })
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    pub fn pattern(&self, id: usize) -> &Pattern {
        &self.patterns[id]
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// All matches in `msg`, one per distinct `(start, end, group)`.
    ///
    /// When several patterns of one group cover the same span, the match
    /// carries the lowest pattern id. Output is sorted.
    pub fn find_matches(&self, msg: &[TaggedToken]) -> Vec<PatternMatch> {
        let lowered: Vec<String> = msg.iter().map(|t| t.surface.to_lowercase()).collect();
        let tags: Vec<&str> = msg.iter().map(|t| t.tag.as_str()).collect();
        let mut scratch = Scratch::default();
        let mut out = Vec::new();

        for start in 0..msg.len() {
            let anchored = self
                .by_first_literal
                .get(&lowered[start])
                .map(Vec::as_slice)
                .unwrap_or(&[]);
            for &id in anchored.iter().chain(&self.unanchored) {
                let pattern = &self.patterns[id];
                for end in scratch.ends(&pattern.elements, start, &lowered, &tags) {
                    out.push(PatternMatch {
                        start,
                        end,
                        group: pattern.group,
                        pattern_id: id,
                    });
                }
            }
        }

        out.sort_unstable();
        out.dedup_by(|b, a| (a.start, a.end, a.group) == (b.start, b.end, b.group));
        out
    }
}

#[derive(Default)]
struct Scratch {
    reach: Vec<usize>,
    next: Vec<usize>,
}

impl Scratch {
    /// Inclusive end indices of every way `elements` matches from `start`.
    fn ends(
        &mut self,
        elements: &[PatternElement],
        start: usize,
        lowered: &[String],
        tags: &[&str],
    ) -> Vec<usize> {
        let n = lowered.len();
        // Positions are "next token to consume"; kept sorted and unique.
        self.reach.clear();
        self.reach.push(start);
        for el in elements {
            self.next.clear();
            match el {
                PatternElement::Gap => {
                    let lo = self.reach[0];
                    self.next.extend(lo..=n);
                }
                _ => {
                    for &p in &self.reach {
                        if p < n && el.accepts(&lowered[p], tags[p]) {
                            self.next.push(p + 1);
                        }
                    }
                }
            }
            std::mem::swap(&mut self.reach, &mut self.next);
            if self.reach.is_empty() {
                return Vec::new();
            }
        }
        // Patterns end on a single-token element, so every position is > start.
        self.reach.iter().map(|&p| p - 1).collect()
    }
}

/// Drops matches strictly contained in another match of the same group.
pub fn max_matches(matches: &[PatternMatch]) -> Vec<PatternMatch> {
    max_matches_with(matches, MaxScope::Group)
}

pub fn max_matches_with(matches: &[PatternMatch], scope: MaxScope) -> Vec<PatternMatch> {
    let mut sorted = matches.to_vec();
    sorted.sort_unstable();
    sorted.dedup();

    let competes = |a: &PatternMatch, b: &PatternMatch| match scope {
        MaxScope::Group => a.group == b.group,
        MaxScope::Global => true,
    };
    sorted
        .iter()
        .filter(|m| {
            !sorted
                .iter()
                .any(|other| competes(other, m) && other.strictly_contains(m))
        })
        .copied()
        .collect()
}

/// Groups present in a match list, in first-seen order.
pub fn groups_of(matches: &[PatternMatch]) -> Vec<PatternGroup> {
    let mut seen = Vec::new();
    for m in matches {
        if !seen.contains(&m.group) {
            seen.push(m.group);
        }
    }
    seen
}
