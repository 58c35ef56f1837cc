//! Rule-algebra properties, shared by the proptest suite and the acceptance
//! harness.

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rbem_core::engine::{
    apply_amplifiers, apply_attenuators, apply_emotion_emissions, apply_leftflips,
    apply_rightflips, blocked, Stops,
};
use rbem_core::{
    classify, run_pipeline, Axis, AxisScores, CompiledModel, Decay, EmissionState, Emotion,
    EngineConfig, Pattern, PatternGroup, PatternMatch, TaggedToken, Trace,
};

use super::{arb_emotion, arb_message, arb_pattern, naive_matches};

type Check = Result<(), TestCaseError>;

fn arb_state(n: usize) -> impl Strategy<Value = EmissionState> {
    prop::collection::vec(-5.0f64..5.0, 4 * n).prop_map(move |vals| {
        let mut st = EmissionState::new(n);
        for (k, v) in vals.into_iter().enumerate() {
            st.set(Axis::ALL[k / n], k % n, v);
        }
        st
    })
}

/// A random state, one match of `group` inside it and a few stops.
#[derive(Debug, Clone)]
pub struct RuleCase {
    pub state: EmissionState,
    pub matched: PatternMatch,
    pub stops: Stops,
}

pub fn rule_case(groups: Vec<PatternGroup>) -> impl Strategy<Value = RuleCase> {
    (1usize..16).prop_flat_map(move |n| {
        (
            arb_state(n),
            0..n,
            0..n,
            prop::sample::select(groups.clone()),
            prop::collection::vec(0..n, 0..=3),
        )
            .prop_map(|(state, a, b, group, stops)| RuleCase {
                state,
                matched: PatternMatch {
                    start: a.min(b),
                    end: a.max(b),
                    group,
                    pattern_id: 0,
                },
                stops: Stops::new(stops),
            })
    })
}

pub fn flip_case() -> impl Strategy<Value = RuleCase> {
    rule_case(vec![PatternGroup::RightFlip, PatternGroup::LeftFlip])
}

pub fn scale_case() -> impl Strategy<Value = RuleCase> {
    rule_case(vec![PatternGroup::Amplifier, PatternGroup::Attenuator])
}

pub fn flip_involution(case: RuleCase) -> Check {
    let mut st = case.state.clone();
    for _ in 0..2 {
        apply_rightflips(&mut st, &[case.matched], &case.stops, &mut ());
        apply_leftflips(&mut st, &[case.matched], &case.stops, &mut ());
    }
    prop_assert_eq!(st, case.state);
    Ok(())
}

pub fn scaling_preserves_sign(case: RuleCase) -> Check {
    let mut st = case.state.clone();
    let amplify = case.matched.group == PatternGroup::Amplifier;
    apply_amplifiers(&mut st, &[case.matched], &case.stops, &mut ());
    apply_attenuators(&mut st, &[case.matched], &case.stops, &mut ());
    for axis in Axis::ALL {
        for (before, after) in case.state.row(axis).iter().zip(st.row(axis)) {
            prop_assert_eq!(before.signum(), after.signum());
            prop_assert_eq!(*before == 0.0, *after == 0.0);
            if amplify {
                prop_assert!(after.abs() >= before.abs());
            } else {
                prop_assert!(after.abs() <= before.abs());
            }
        }
    }
    Ok(())
}

/// (message length, match span seed, stops, emotion)
pub type EmissionCase = (usize, (usize, usize), Vec<usize>, Emotion);

pub fn emission_case(with_stops: bool) -> impl Strategy<Value = EmissionCase> {
    let max_stops = if with_stops { 4 } else { 0 };
    (
        1usize..40,
        any::<(usize, usize)>(),
        prop::collection::vec(0usize..40, 0..=max_stops),
        arb_emotion(),
    )
}

fn emit(case: &EmissionCase) -> (PatternMatch, Stops, EmissionState) {
    let (n, (a, b), stops, emo) = case;
    let (a, b) = (a % n, b % n);
    let m = PatternMatch {
        start: a.min(b),
        end: a.max(b),
        group: PatternGroup::Emotion(*emo),
        pattern_id: 0,
    };
    let stops = Stops::new(stops.iter().copied().filter(|&t| t < *n).collect());
    let mut st = EmissionState::new(*n);
    apply_emotion_emissions(&mut st, &[m], &stops, Decay::Distance, &mut ());
    (m, stops, st)
}

pub fn decay_monotone(case: EmissionCase) -> Check {
    let (m, _, st) = emit(&case);
    let (c, row) = (m.center(), st.row(case.3.axis()));
    for i in 0..row.len() {
        for j in 0..row.len() {
            if i.abs_diff(c) < j.abs_diff(c) {
                prop_assert!(row[i].abs() > row[j].abs(), "i={} j={} c={}", i, j, c);
            }
        }
    }
    Ok(())
}

pub fn stop_isolation(case: EmissionCase) -> Check {
    let (m, stops, st) = emit(&case);
    let c = m.center();
    for i in 0..st.len() {
        let v = st.get(case.3.axis(), i);
        prop_assert_eq!(blocked(c, i, &stops), v == 0.0, "i={} c={}", i, c);
    }
    Ok(())
}

pub fn model_and_message(
    max_patterns: usize,
    pattern_len: usize,
    msg_len: usize,
) -> impl Strategy<Value = (Vec<Pattern>, Vec<TaggedToken>)> {
    (
        prop::collection::vec(arb_pattern(pattern_len), 0..=max_patterns),
        arb_message(msg_len),
    )
}

pub fn matcher_equals_oracle((patterns, msg): (Vec<Pattern>, Vec<TaggedToken>)) -> Check {
    let model = CompiledModel::compile(patterns.clone()).unwrap();
    prop_assert_eq!(model.find_matches(&msg), naive_matches(&patterns, &msg));
    Ok(())
}

pub fn trace_replays((patterns, msg): (Vec<Pattern>, Vec<TaggedToken>)) -> Check {
    let model = CompiledModel::compile(patterns).unwrap();
    let config = EngineConfig::default();
    let (state, trace) = run_pipeline(&model, &msg, &config);
    prop_assert!(state.is_finite());
    prop_assert_eq!(&trace.replay(msg.len()), &state);
    let json = serde_json::to_string(&trace).unwrap();
    let back: Trace = serde_json::from_str(&json).unwrap();
    prop_assert_eq!(&back.replay(msg.len()), &state);
    let (again, _) = run_pipeline(&model, &msg, &config);
    prop_assert_eq!(again, state);
    Ok(())
}

pub fn scale_input() -> impl Strategy<Value = ([f64; 4], f64)> {
    (prop::array::uniform4(-10.0f64..10.0), 1e-3f64..1e3)
}

pub fn classify_scale_invariant((axes, lambda): ([f64; 4], f64)) -> Check {
    let s = AxisScores::from_array(axes);
    let scaled = AxisScores::from_array(axes.map(|v| v * lambda));
    prop_assert_eq!(classify(&s), classify(&scaled));
    Ok(())
}
