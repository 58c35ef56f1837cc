//! Synthetic workloads for the benchmarks: random vocabularies, pattern
//! models and messages with a fixed seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rbem_core::{Pattern, PatternElement, PatternGroup, TaggedToken};

pub struct Workload {
    pub patterns: Vec<Pattern>,
    pub messages: Vec<Vec<TaggedToken>>,
}

fn vocabulary(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("w{i}")).collect()
}

/// `n_patterns` patterns of 1-3 elements and `n_messages` messages of
/// `msg_len` tokens drawn from a shared vocabulary.
pub fn workload(n_patterns: usize, n_messages: usize, msg_len: usize, seed: u64) -> Workload {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vocab = vocabulary(2_000);
    let groups = PatternGroup::all();

    let patterns = (0..n_patterns)
        .map(|_| {
            let len = rng.gen_range(1..=3);
            let mut elements = vec![PatternElement::literal(vocab.choose(&mut rng).unwrap())];
            for k in 1..len {
                let el = match rng.gen_range(0..4) {
                    0 if k + 1 < len => PatternElement::Gap,
                    1 => PatternElement::any_one(),
                    _ => PatternElement::literal(vocab.choose(&mut rng).unwrap()),
                };
                elements.push(el);
            }
            let group = *groups.choose(&mut rng).unwrap();
            Pattern::new(elements, group).expect("generated pattern is valid")
        })
        .collect();

    let messages = (0..n_messages)
        .map(|_| {
            (0..msg_len)
                .map(|_| TaggedToken::untagged(vocab.choose(&mut rng).unwrap().as_str()))
                .collect()
        })
        .collect();

    Workload { patterns, messages }
}
