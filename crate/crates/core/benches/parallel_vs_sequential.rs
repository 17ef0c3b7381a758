use std::collections::BTreeMap;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use mtprep::bpe::{train_bpe, TrainParams};
use mtprep::dataprep::{format_examples, LengthLimits, Origin, ParallelRecord, PromptTemplate};
use mtprep::efficiency::{analyze, AnalyzeOptions, ConcatMode, MultiParallelCorpus};
use mtprep::sampling::count_words_with;
use mtprep::{Execution, Tokenizer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sentences(script: (u32, u32), n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lexicon: Vec<String> = (0..400)
        .map(|_| {
            (0..rng.gen_range(2..8))
                .map(|_| char::from_u32(rng.gen_range(script.0..=script.1)).unwrap())
                .collect()
        })
        .collect();
    (0..n)
        .map(|_| {
            (0..rng.gen_range(5..20))
                .map(|_| {
                    let u: f64 = rng.gen();
                    lexicon[(u * u * lexicon.len() as f64) as usize].as_str()
                })
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}

fn tokenizer(docs: &[String], size: usize) -> Tokenizer {
    train_bpe(docs, &TrainParams::new(size)).unwrap()
}

fn bench_train(c: &mut Criterion) {
    let docs = sentences((0x915, 0x939), 4000, 1);
    let mut g = c.benchmark_group("train_bpe");
    g.sample_size(10);
    for (name, execution) in MODES {
        let params = TrainParams {
            execution,
            ..TrainParams::new(2000)
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| train_bpe(black_box(&docs), &params).unwrap())
        });
    }
    g.finish();
}

fn bench_analyze(c: &mut Criterion) {
    let en = sentences((0x61, 0x7a), 2000, 2);
    let mut translations = BTreeMap::new();
    for (i, script) in [(0x915, 0x939), (0x4e00, 0x4e80), (0x430, 0x44f)].into_iter().enumerate() {
        translations.insert(format!("l{i}"), sentences(script, 2000, 10 + i as u64));
    }
    let corpus = MultiParallelCorpus::new("en", en.clone(), translations).unwrap();
    let toks: BTreeMap<String, Tokenizer> = [("base".to_string(), tokenizer(&en, 1500))].into();
    let mut g = c.benchmark_group("analyze");
    for (name, execution) in MODES {
        let opts = AnalyzeOptions {
            mode: ConcatMode::Newline,
            execution,
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| analyze(black_box(&toks), &corpus, "bench", opts).unwrap())
        });
    }
    g.finish();
}

fn bench_count_words(c: &mut Criterion) {
    let docs = sentences((0x61, 0x7a), 50_000, 3);
    let mut g = c.benchmark_group("count_words");
    for (name, execution) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| count_words_with(black_box(&docs), execution))
        });
    }
    g.finish();
}

fn bench_format(c: &mut Criterion) {
    let src = sentences((0x61, 0x7a), 5000, 4);
    let tgt = sentences((0x430, 0x44f), 5000, 5);
    let records: Vec<ParallelRecord> = src
        .iter()
        .zip(&tgt)
        .map(|(s, t)| ParallelRecord::new("en", "ru", s, t, Origin::Wmt).unwrap())
        .collect();
    let t = tokenizer(&src, 1500);
    let template = PromptTemplate::default();
    let mut g = c.benchmark_group("format_examples");
    for (name, execution) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| format_examples(black_box(&records), &template, &t, LengthLimits::default(), execution))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_train, bench_analyze, bench_count_words, bench_format);
criterion_main!(benches);
