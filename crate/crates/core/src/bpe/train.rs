use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap, HashSet};

use super::{pre_split, Normalization, TokenId, Tokenizer};
use crate::{Error, Execution, Result};

type Pair = (TokenId, TokenId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainParams {
    pub target_vocab_size: usize,
    /// Pairs seen fewer times than this are never merged.
    pub min_pair_frequency: u64,
    pub normalization: Normalization,
    pub execution: Execution,
}

impl Default for TrainParams {
    fn default() -> Self {
        TrainParams {
            target_vocab_size: 12_000,
            min_pair_frequency: 2,
            normalization: Normalization::Identity,
            execution: Execution::default(),
        }
    }
}

impl TrainParams {
    pub fn new(target_vocab_size: usize) -> Self {
        TrainParams {
            target_vocab_size,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_vocab_size < 256 {
            return Err(Error::VocabTooSmall(self.target_vocab_size));
        }
        if self.min_pair_frequency == 0 {
            return Err(Error::InvalidMinFrequency);
        }
        Ok(())
    }
}

struct Word {
    symbols: Vec<TokenId>,
    count: u64,
}

impl Word {
    /// Merges every non-overlapping occurrence of `pair`, left to right.
    fn merge(&mut self, pair: Pair, merged: TokenId) {
        let mut out = Vec::with_capacity(self.symbols.len());
        let mut i = 0;
        while i < self.symbols.len() {
            if i + 1 < self.symbols.len() && (self.symbols[i], self.symbols[i + 1]) == pair {
                out.push(merged);
                i += 2;
            } else {
                out.push(self.symbols[i]);
                i += 1;
            }
        }
        self.symbols = out;
    }
}

// Max-heap key: higher count first, then lexicographically smaller
// concatenation, then smaller left token bytes.
#[derive(PartialEq, Eq)]
struct Candidate {
    count: u64,
    concat: Vec<u8>,
    left: Vec<u8>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.count
            .cmp(&other.count)
            .then_with(|| Reverse(&self.concat).cmp(&Reverse(&other.concat)))
            .then_with(|| Reverse(&self.left).cmp(&Reverse(&other.left)))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Trains a byte-level BPE tokenizer.
///
/// Token ids 0..=255 are the single bytes in byte order; learned tokens
/// follow in merge order. Each step merges the most frequent adjacent pair
/// (ties go to the lexicographically smaller concatenation). Training stops
/// once the vocabulary reaches `target_vocab_size` or the best remaining
/// pair is rarer than `min_pair_frequency`.
pub fn train_bpe<S: AsRef<str> + Sync>(corpus: &[S], params: &TrainParams) -> Result<Tokenizer> {
    params.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus("training corpus has no documents".into()));
    }

    let mut tokens: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
    let mut ids: HashMap<Vec<u8>, TokenId> = tokens.iter().cloned().zip(0..).collect();
    let mut merges: Vec<Pair> = Vec::new();
    if params.target_vocab_size == 256 {
        return Tokenizer::from_ids(tokens, merges);
    }

    let mut words = collect_words(corpus, params);
    let (mut pair_counts, mut where_found) = count_pairs(&words, params.execution);

    let candidate = |pair: Pair, count: u64, tokens: &[Vec<u8>]| {
        let left = tokens[pair.0 as usize].clone();
        let concat = [left.as_slice(), tokens[pair.1 as usize].as_slice()].concat();
        Candidate {
            count,
            concat,
            left,
            pair,
        }
    };
    let mut heap: BinaryHeap<Candidate> = pair_counts
        .iter()
        .map(|(&pair, &count)| candidate(pair, count as u64, &tokens))
        .collect();

    while tokens.len() < params.target_vocab_size {
        let Some(top) = heap.pop() else { break };
        let current = pair_counts.get(&top.pair).copied().unwrap_or(0);
        if current <= 0 || current as u64 != top.count {
            // stale; a fresh entry was pushed when the count changed
            continue;
        }
        if top.count < params.min_pair_frequency {
            break;
        }

        let pair = top.pair;
        let merged = match ids.get(&top.concat) {
            Some(&id) => id,
            None => {
                let id = tokens.len() as TokenId;
                ids.insert(top.concat.clone(), id);
                tokens.push(top.concat);
                id
            }
        };
        merges.push(pair);

        let mut affected: Vec<usize> = where_found.remove(&pair).map(|s| s.into_iter().collect()).unwrap_or_default();
        affected.sort_unstable();
        let mut delta: HashMap<Pair, i64> = HashMap::new();
        for wi in affected {
            let word = &mut words[wi];
            if !word.symbols.windows(2).any(|w| (w[0], w[1]) == pair) {
                continue;
            }
            let count = word.count as i64;
            for w in word.symbols.windows(2) {
                *delta.entry((w[0], w[1])).or_default() -= count;
            }
            word.merge(pair, merged);
            for w in word.symbols.windows(2) {
                let p = (w[0], w[1]);
                *delta.entry(p).or_default() += count;
                where_found.entry(p).or_default().insert(wi);
            }
        }
        pair_counts.remove(&pair);
        for (p, d) in delta {
            if d == 0 || p == pair {
                continue;
            }
            let c = pair_counts.entry(p).or_default();
            *c += d;
            if *c > 0 {
                heap.push(candidate(p, *c as u64, &tokens));
            } else {
                pair_counts.remove(&p);
            }
        }
    }

    Tokenizer::from_ids(tokens, merges)
}

fn collect_words<S: AsRef<str> + Sync>(corpus: &[S], params: &TrainParams) -> Vec<Word> {
    let counts = params.execution.fold_reduce(
        corpus,
        HashMap::<Vec<u8>, u64>::new,
        |mut acc, doc| {
            let text = params.normalization.apply(doc.as_ref());
            for piece in pre_split(&text) {
                if piece.len() > 1 {
                    *acc.entry(piece.as_bytes().to_vec()).or_default() += 1;
                }
            }
            acc
        },
        merge_counts,
    );
    let mut words: Vec<(Vec<u8>, u64)> = counts.into_iter().collect();
    words.sort_unstable();
    words
        .into_iter()
        .map(|(bytes, count)| Word {
            symbols: bytes.into_iter().map(TokenId::from).collect(),
            count,
        })
        .collect()
}

fn merge_counts<K: std::hash::Hash + Eq>(a: HashMap<K, u64>, b: HashMap<K, u64>) -> HashMap<K, u64> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    for (k, v) in small {
        *big.entry(k).or_default() += v;
    }
    big
}

type PairIndex = (HashMap<Pair, i64>, HashMap<Pair, HashSet<usize>>);

fn count_pairs(words: &[Word], execution: Execution) -> PairIndex {
    let indexed: Vec<(usize, &Word)> = words.iter().enumerate().collect();
    execution.fold_reduce(
        &indexed,
        || (HashMap::new(), HashMap::new()),
        |(mut counts, mut where_found): PairIndex, &(wi, word)| {
            for w in word.symbols.windows(2) {
                let p = (w[0], w[1]);
                *counts.entry(p).or_default() += word.count as i64;
                where_found.entry(p).or_insert_with(HashSet::new).insert(wi);
            }
            (counts, where_found)
        },
        |(mut c1, mut w1), (c2, w2)| {
            for (k, v) in c2 {
                *c1.entry(k).or_default() += v;
            }
            for (k, v) in w2 {
                w1.entry(k).or_default().extend(v);
            }
            (c1, w1)
        },
    )
}
