use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::{TokenId, Tokenizer};

const NONE: usize = usize::MAX;

struct Symbol {
    id: TokenId,
    prev: usize,
    next: usize,
    alive: bool,
}

impl Tokenizer {
    /// Applies merges to one pre-split piece: repeatedly merges the adjacent
    /// pair of lowest rank (leftmost first on ties) until none applies.
    pub(super) fn encode_piece(&self, bytes: &[u8], out: &mut Vec<TokenId>) {
        match bytes.len() {
            0 => return,
            1 => {
                out.push(self.byte_ids[bytes[0] as usize]);
                return;
            }
            _ => {}
        }
        if self.merge_lookup.is_empty() {
            out.extend(bytes.iter().map(|&b| self.byte_ids[b as usize]));
            return;
        }

        let n = bytes.len();
        let mut syms: Vec<Symbol> = bytes
            .iter()
            .enumerate()
            .map(|(i, &b)| Symbol {
                id: self.byte_ids[b as usize],
                prev: if i == 0 { NONE } else { i - 1 },
                next: if i + 1 == n { NONE } else { i + 1 },
                alive: true,
            })
            .collect();

        let mut heap = BinaryHeap::new();
        for i in 0..n - 1 {
            if let Some(&(rank, _)) = self.merge_lookup.get(&(syms[i].id, syms[i + 1].id)) {
                heap.push(Reverse((rank, i)));
            }
        }

        while let Some(Reverse((rank, pos))) = heap.pop() {
            if !syms[pos].alive {
                continue;
            }
            let next = syms[pos].next;
            if next == NONE {
                continue;
            }
            let merged = match self.merge_lookup.get(&(syms[pos].id, syms[next].id)) {
                Some(&(r, merged)) if r == rank => merged,
                _ => continue,
            };
            let after = syms[next].next;
            syms[pos].id = merged;
            syms[pos].next = after;
            syms[next].alive = false;
            if after != NONE {
                syms[after].prev = pos;
                if let Some(&(r, _)) = self.merge_lookup.get(&(merged, syms[after].id)) {
                    heap.push(Reverse((r, pos)));
                }
            }
            let prev = syms[pos].prev;
            if prev != NONE {
                if let Some(&(r, _)) = self.merge_lookup.get(&(syms[prev].id, merged)) {
                    heap.push(Reverse((r, prev)));
                }
            }
        }

        let mut i = 0;
        while i != NONE {
            out.push(syms[i].id);
            i = syms[i].next;
        }
    }
}
