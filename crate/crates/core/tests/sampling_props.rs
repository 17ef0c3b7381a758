mod common;

use std::collections::BTreeMap;

use approx::assert_abs_diff_eq;
use common::rng;
use mtprep::sampling::{
    compute_plan, compute_plan_with_share, count_words_with, mix_corpus, pack_sequences, LanguageStats, SamplingPlan,
};
use mtprep::Execution;
use proptest::collection::{btree_map, vec};
use proptest::prelude::*;
use rand::Rng;

fn stats(counts: &BTreeMap<String, u64>) -> LanguageStats {
    let mut c = counts.clone();
    c.insert("en".into(), 1_000_000_000);
    LanguageStats::new("en", c)
}

fn lang_counts(max: u64) -> impl Strategy<Value = BTreeMap<String, u64>> {
    btree_map("[a-z]{2}".prop_filter("not english", |s| s != "en"), 1..max, 1..12)
}

/// Independent oracle: log-space weights.
fn oracle(counts: &BTreeMap<String, u64>, t: f64, share: f64) -> BTreeMap<String, f64> {
    let logs: Vec<(String, f64)> = counts.iter().map(|(l, &d)| (l.clone(), (d as f64).ln() / t)).collect();
    let m = logs.iter().map(|(_, x)| *x).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = logs.iter().map(|(_, x)| (x - m).exp()).sum();
    logs.into_iter().map(|(l, x)| (l, (1.0 - share) * (x - m).exp() / z)).collect()
}

proptest! {
    #[test]
    fn plan_sums_to_one_and_matches_oracle(counts in lang_counts(u64::MAX / 4), t in 0.5f64..50.0) {
        let plan = compute_plan(&stats(&counts), t).unwrap();
        let sum: f64 = plan.probabilities.values().sum();
        prop_assert!((sum - 1.0).abs() <= 1e-12, "sum {}", sum);
        prop_assert_eq!(plan.probability("en"), 0.1);
        plan.validate(1e-12).unwrap();
        for (l, p) in oracle(&counts, t, 0.1) {
            prop_assert!((plan.probability(&l) - p).abs() <= 1e-12, "{}: {} vs {}", l, plan.probability(&l), p);
        }
    }

    #[test]
    fn probability_grows_with_word_count(counts in lang_counts(1 << 40), t in 1.0f64..20.0, bump in 1u64..1_000_000) {
        let base = compute_plan(&stats(&counts), t).unwrap();
        let target = counts.keys().next().unwrap().clone();
        let mut more = counts.clone();
        *more.get_mut(&target).unwrap() += bump;
        let bumped = compute_plan(&stats(&more), t).unwrap();
        prop_assert!(bumped.probability(&target) >= base.probability(&target));
        for l in counts.keys().filter(|l| **l != target) {
            prop_assert!(bumped.probability(l) <= base.probability(l) + 1e-15);
        }
    }

    #[test]
    fn huge_temperature_is_uniform(counts in lang_counts(100_000)) {
        let n = counts.len() as f64;
        let uniform = 0.9 / n;
        let (lo, hi) = (*counts.values().min().unwrap() as f64, *counts.values().max().unwrap() as f64);
        // first-order deviation from uniform is uniform * ln(D / geometric mean) / T
        let plan = compute_plan(&stats(&counts), 1e6).unwrap();
        let bound = uniform * (hi / lo).ln() / 1e6 + 1e-12;
        for l in counts.keys() {
            prop_assert!((plan.probability(l) - uniform).abs() <= bound);
        }
        if (hi / lo).ln() <= n / 0.9 {
            for l in counts.keys() {
                prop_assert!((plan.probability(l) - uniform).abs() <= 1e-6);
            }
        }
        let plan = compute_plan(&stats(&counts), 1e9).unwrap();
        for l in counts.keys() {
            prop_assert!((plan.probability(l) - uniform).abs() <= 1e-6);
        }
    }

    #[test]
    fn unit_temperature_is_proportional(counts in lang_counts(1 << 30), share in 0.0f64..0.9) {
        let plan = compute_plan_with_share(&stats(&counts), 1.0, share).unwrap();
        let total: u64 = counts.values().sum();
        for (l, &d) in &counts {
            let want = (1.0 - share) * d as f64 / total as f64;
            prop_assert!((plan.probability(l) - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn packing_conserves_tokens(lens in vec(0usize..5000, 0..60), seq_len in 1usize..3000) {
        let docs: Vec<Vec<u32>> = lens.iter().enumerate().map(|(i, &n)| vec![i as u32; n]).collect();
        let (seqs, st) = pack_sequences(docs.iter().map(|d| d.as_slice()), seq_len, u32::MAX).unwrap();
        prop_assert!(seqs.iter().all(|s| s.len() == seq_len));
        let total: usize = lens.iter().sum::<usize>() + lens.len();
        prop_assert_eq!(total, seq_len * seqs.len() + st.dropped);
        prop_assert!(st.dropped < seq_len);
        let flat: Vec<u32> = seqs.concat();
        let mut want = Vec::new();
        for d in &docs {
            want.extend_from_slice(d);
            want.push(u32::MAX);
        }
        prop_assert_eq!(&flat[..], &want[..flat.len()]);
    }
}

#[test]
fn word_count_matches_char_scan() {
    let mut r = rng(5);
    let pool = ['a', 'é', '字', ' ', '\t', '\n', '\u{3000}', '\u{a0}', 'z', '\r'];
    let docs: Vec<String> = (0..10_000)
        .map(|_| (0..r.gen_range(0..40)).map(|_| pool[r.gen_range(0..pool.len())]).collect())
        .collect();
    let mut expected = 0u64;
    for d in &docs {
        let mut in_word = false;
        for c in d.chars() {
            if c.is_whitespace() {
                in_word = false;
            } else if !in_word {
                in_word = true;
                expected += 1;
            }
        }
    }
    assert_eq!(count_words_with(&docs, Execution::Sequential), expected);
    assert_eq!(count_words_with(&docs, Execution::Parallel), expected);
}

#[test]
fn mixer_reproduces_reference_plan() {
    let plan = SamplingPlan::reference();
    let shards: BTreeMap<String, Vec<usize>> =
        plan.probabilities.keys().map(|l| (l.clone(), (0..997).collect())).collect();
    let n = 100_000;
    let (docs, st) = mix_corpus(&plan, &shards, 42, n).unwrap();
    assert_eq!(docs.len(), n);
    for (l, &p) in &plan.probabilities {
        let freq = st.draws[l] as f64 / n as f64;
        assert_abs_diff_eq!(freq, p, epsilon = 0.01);
        assert_eq!(st.epochs[l], st.draws[l] / 997);
    }
    let again: Vec<_> = mix_corpus(&plan, &shards, 42, n).unwrap().0.iter().map(|d| (d.language, *d.doc)).collect();
    assert_eq!(again, docs.iter().map(|d| (d.language, *d.doc)).collect::<Vec<_>>());
    let other: Vec<_> = mix_corpus(&plan, &shards, 43, 1000).unwrap().0.iter().map(|d| d.language).collect();
    assert_ne!(other, docs[..1000].iter().map(|d| d.language).collect::<Vec<_>>());
}

#[test]
fn plan_json_round_trips() {
    let counts: BTreeMap<String, u64> = [("de".to_string(), 64), ("is".to_string(), 1)].into();
    let plan = compute_plan(&stats(&counts), 6.0).unwrap();
    let back = SamplingPlan::from_json(&plan.to_json()).unwrap();
    assert_eq!(back, plan);
}

#[test]
fn bare_probability_vector_is_accepted() {
    let plan = SamplingPlan::from_json(r#"{"probabilities": {"en": 0.1, "de": 0.9}}"#).unwrap();
    assert_eq!(plan.english_share, 0.1);
    plan.validate(1e-12).unwrap();
}
