#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A synthetic "language": a fixed lexicon of pseudo-words drawn from one
/// script's code-point range, with a skewed word distribution.
pub struct SyntheticLanguage {
    lexicon: Vec<String>,
}

pub const LATIN: (u32, u32) = (0x61, 0x7A);
pub const GREEK: (u32, u32) = (0x3B1, 0x3C9);
pub const DEVANAGARI: (u32, u32) = (0x915, 0x939);
pub const CJK: (u32, u32) = (0x4E00, 0x4E80);
pub const HIRAGANA: (u32, u32) = (0x3041, 0x3093);
pub const CYRILLIC: (u32, u32) = (0x430, 0x44F);

impl SyntheticLanguage {
    pub fn new(script: (u32, u32), lexicon_size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lexicon = (0..lexicon_size)
            .map(|_| {
                let len = rng.gen_range(2..=7);
                (0..len)
                    .map(|_| char::from_u32(rng.gen_range(script.0..=script.1)).unwrap())
                    .collect()
            })
            .collect();
        SyntheticLanguage { lexicon }
    }

    pub fn sentence(&self, rng: &mut impl Rng) -> String {
        let n = rng.gen_range(4..=14);
        (0..n)
            .map(|_| {
                let u: f64 = rng.gen();
                &self.lexicon[((u * u) * self.lexicon.len() as f64) as usize]
            })
            .cloned()
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn sentences(&self, n: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sentence(&mut rng)).collect()
    }
}

/// Random valid UTF-8 mixing ASCII, whitespace, and multi-byte scripts.
pub fn random_text(rng: &mut impl Rng, max_chars: usize) -> String {
    let n = rng.gen_range(0..=max_chars);
    (0..n)
        .map(|_| match rng.gen_range(0..10) {
            0 => ' ',
            1 => ['\n', '\t', '\u{3000}', '\u{a0}'][rng.gen_range(0..4)],
            2..=4 => char::from_u32(rng.gen_range(0x61..=0x66)).unwrap(),
            5 => char::from_u32(rng.gen_range(0x915..=0x920)).unwrap(),
            6 => char::from_u32(rng.gen_range(0x3B1..=0x3B6)).unwrap(),
            7 => char::from_u32(rng.gen_range(0x4E00..=0x4E08)).unwrap(),
            8 => char::from_u32(rng.gen_range(0x1F600..=0x1F603)).unwrap(),
            _ => loop {
                if let Some(c) = char::from_u32(rng.gen_range(0..=0x10FFFF)) {
                    break c;
                }
            },
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
