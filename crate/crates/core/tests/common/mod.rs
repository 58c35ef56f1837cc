//! Test-only oracles and generators. The oracles follow the rule
//! definitions literally (exhaustive gap enumeration, per-token blocking
//! checks) and share no code with the optimized paths they check.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod props;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rbem_core::model::TagConstraint;
use rbem_core::{Emotion, Pattern, PatternElement, PatternGroup, PatternMatch, TaggedToken};

pub const VOCAB: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
pub const TAGS: [&str; 2] = ["X", "N"];

pub fn workspace_file(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn token_ok(el: &PatternElement, tok: &TaggedToken) -> bool {
    let tag_ok = |tc: &TagConstraint| match tc {
        TagConstraint::Any => true,
        TagConstraint::Exactly(t) => *t == tok.tag,
    };
    match el {
        PatternElement::Literal { surface, tag } => {
            *surface == tok.surface.to_lowercase() && tag_ok(tag)
        }
        PatternElement::AnyOne { tag } => tag_ok(tag),
        PatternElement::Gap => false,
    }
}

fn enumerate_ends(
    elements: &[PatternElement],
    pos: usize,
    msg: &[TaggedToken],
    out: &mut BTreeSet<usize>,
) {
    let Some((el, rest)) = elements.split_first() else {
        out.insert(pos - 1);
        return;
    };
    if *el == PatternElement::Gap {
        for skip in 0..=(msg.len() - pos) {
            enumerate_ends(rest, pos + skip, msg, out);
        }
    } else if pos < msg.len() && token_ok(el, &msg[pos]) {
        enumerate_ends(rest, pos + 1, msg, out);
    }
}

/// Tries every pattern at every offset with exhaustive gap expansion, then
/// keeps one match per (start, end, group) with the lowest pattern id.
pub fn naive_matches(patterns: &[Pattern], msg: &[TaggedToken]) -> Vec<PatternMatch> {
    let mut all = Vec::new();
    for (id, p) in patterns.iter().enumerate() {
        for start in 0..msg.len() {
            let mut ends = BTreeSet::new();
            enumerate_ends(&p.elements, start, msg, &mut ends);
            for end in ends {
                all.push(PatternMatch {
                    start,
                    end,
                    group: p.group,
                    pattern_id: id,
                });
            }
        }
    }
    let mut best: Vec<PatternMatch> = Vec::new();
    for m in all {
        match best
            .iter_mut()
            .find(|b| (b.start, b.end, b.group) == (m.start, m.end, m.group))
        {
            Some(b) if m.pattern_id < b.pattern_id => *b = m,
            Some(_) => {}
            None => best.push(m),
        }
    }
    best.sort();
    best
}

fn ref_blocked(c: usize, i: usize, stops: &[usize]) -> bool {
    if c == i {
        return false;
    }
    let (lo, hi) = (c.min(i), c.max(i));
    stops.iter().any(|&t| lo <= t && t <= hi)
}

fn w(i: usize, c: usize) -> f64 {
    (-((i as f64 - c as f64).abs())).exp()
}

/// Literal per-token evaluation of the rule pipeline on reduced matches.
pub fn reference_rules(n: usize, matches: &[PatternMatch], continuators: bool) -> [Vec<f64>; 4] {
    let mut em: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n]);
    let stops: Vec<usize> = matches
        .iter()
        .filter(|m| m.group == PatternGroup::Stop)
        .map(|m| (m.start + m.end) / 2)
        .collect();
    let of = |g: fn(PatternGroup) -> bool| matches.iter().filter(move |m| g(m.group));

    for m in of(|g| matches!(g, PatternGroup::Emotion(_))) {
        let PatternGroup::Emotion(e) = m.group else {
            unreachable!()
        };
        let c = (m.start + m.end) / 2;
        let row = (e.esc() - 1) as usize;
        for i in 0..n {
            if !ref_blocked(c, i, &stops) {
                em[row][i] += e.sign() * w(i, c);
            }
        }
    }
    for (group, amplify) in [
        (PatternGroup::Amplifier, true),
        (PatternGroup::Attenuator, false),
    ] {
        for m in matches.iter().filter(|m| m.group == group) {
            let c = (m.start + m.end) / 2;
            for i in 0..n {
                if (m.start..=m.end).contains(&i) || ref_blocked(c, i, &stops) {
                    continue;
                }
                let f = if amplify {
                    1.0 + w(i, c)
                } else {
                    1.0 - w(i, c)
                };
                for row in em.iter_mut() {
                    row[i] *= f;
                }
            }
        }
    }
    for m in matches
        .iter()
        .filter(|m| m.group == PatternGroup::RightFlip)
    {
        for i in m.end + 1..n {
            if stops.iter().any(|&t| m.end < t && t <= i) {
                continue;
            }
            for row in em.iter_mut() {
                row[i] = -row[i];
            }
        }
    }
    for m in matches.iter().filter(|m| m.group == PatternGroup::LeftFlip) {
        for i in 0..m.start {
            if stops.iter().any(|&t| i <= t && t < m.start) {
                continue;
            }
            for row in em.iter_mut() {
                row[i] = -row[i];
            }
        }
    }
    if continuators {
        for m in matches
            .iter()
            .filter(|m| m.group == PatternGroup::Continuator)
        {
            let c = (m.start + m.end) / 2;
            let carried: Vec<f64> = em
                .iter()
                .map(|row| if m.start > 0 { row[m.start - 1] } else { 0.0 })
                .collect();
            for i in m.end + 1..n {
                if stops.iter().any(|&t| m.end < t && t <= i) {
                    continue;
                }
                for (row, v) in em.iter_mut().zip(&carried) {
                    row[i] += v * w(i, c);
                }
            }
        }
    }
    em
}

pub fn arb_group() -> impl Strategy<Value = PatternGroup> {
    prop::sample::select(PatternGroup::all())
}

pub fn arb_emotion() -> impl Strategy<Value = Emotion> {
    prop::sample::select(Emotion::ALL.to_vec())
}

fn arb_tag_constraint() -> impl Strategy<Value = TagConstraint> {
    prop_oneof![
        3 => Just(TagConstraint::Any),
        1 => prop::sample::select(TAGS.to_vec()).prop_map(|t| TagConstraint::Exactly(t.into())),
    ]
}

fn arb_single() -> impl Strategy<Value = PatternElement> {
    prop_oneof![
        4 => (prop::sample::select(VOCAB.to_vec()), arb_tag_constraint())
            .prop_map(|(s, tag)| PatternElement::Literal { surface: s.into(), tag }),
        1 => arb_tag_constraint().prop_map(|tag| PatternElement::AnyOne { tag }),
    ]
}

fn arb_any_element() -> impl Strategy<Value = PatternElement> {
    prop_oneof![3 => arb_single(), 1 => Just(PatternElement::Gap)]
}

/// Valid patterns of 1..=max_len elements over [`VOCAB`].
pub fn arb_pattern(max_len: usize) -> impl Strategy<Value = Pattern> {
    (
        arb_single(),
        prop::collection::vec(arb_any_element(), 0..=max_len.saturating_sub(2)),
        prop::option::of(arb_single()),
        arb_group(),
    )
        .prop_map(|(first, middle, last, group)| {
            let mut elements = vec![first];
            if let Some(last) = last {
                elements.extend(middle);
                elements.push(last);
            }
            Pattern::new(elements, group).expect("generated pattern is valid")
        })
}

pub fn arb_token() -> impl Strategy<Value = TaggedToken> {
    (
        prop::sample::select(VOCAB.to_vec()),
        any::<bool>(),
        prop::sample::select(TAGS.to_vec()),
    )
        .prop_map(|(s, upper, tag)| {
            let surface = if upper {
                s.to_uppercase()
            } else {
                s.to_string()
            };
            TaggedToken::new(surface, tag)
        })
}

pub fn arb_message(max_len: usize) -> impl Strategy<Value = Vec<TaggedToken>> {
    prop::collection::vec(arb_token(), 0..=max_len)
}

pub fn arb_match(
    n: usize,
    group: impl Strategy<Value = PatternGroup>,
) -> impl Strategy<Value = PatternMatch> {
    (0..n, 0..n, group).prop_map(|(a, b, group)| PatternMatch {
        start: a.min(b),
        end: a.max(b),
        group,
        pattern_id: 0,
    })
}

pub fn arb_stops(n: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..n, 0..=3)
}
