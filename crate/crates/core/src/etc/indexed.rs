//! Incremental pair-substitution engine.
//!
//! The sequence lives in a doubly linked list over the original positions.
//! Every counted pair occurrence is keyed by the node holding its left
//! symbol, and a priority set orders pairs by the same key as
//! [`select_pair`](super::select_pair). A substitution only touches the
//! occurrences being replaced, their left neighbours and any same-symbol
//! runs they sit in, so a run costs roughly `O(L log L)` instead of the
//! `O(L)` rescan per iteration of the naive engine.
//!
//! Same-symbol pairs are counted left to right without overlap: inside a
//! maximal run only the nodes at even offsets from the run start carry an
//! occurrence. Node ids are original positions, which keeps them ordered
//! along the list, so the smallest id of a pair is its first occurrence.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use super::pairs::Pair;
use super::sequence::{Alphabet, SymbolId, SymbolicSequence};
use super::{SubstitutionEngine, SubstitutionStep};

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    count: Reverse<usize>,
    pair_scale: usize,
    left_scale: usize,
    first: u32,
    left: SymbolId,
    right: SymbolId,
}

#[derive(Debug, Default)]
struct PairSlot {
    positions: BTreeSet<u32>,
    key: Option<QueueKey>,
}

#[derive(Debug)]
pub struct IndexedEngine {
    sym: Vec<SymbolId>,
    prev: Vec<u32>,
    next: Vec<u32>,
    alive: Vec<bool>,
    indexed: Vec<bool>,
    head: u32,
    len: usize,
    original_length: usize,
    alphabet: Alphabet,
    // occurrences of each symbol id in the current sequence
    freq: Vec<usize>,
    distinct: usize,
    pairs: HashMap<Pair, PairSlot>,
    queue: BTreeSet<QueueKey>,
    iteration: usize,
    // per-step scratch
    touched: Vec<Pair>,
    dirty: Vec<u32>,
    dirty_mark: Vec<u32>,
    run_mark: Vec<u32>,
    done_mark: Vec<u32>,
    stamp: u32,
}

impl IndexedEngine {
    pub fn new(seq: SymbolicSequence) -> Self {
        let original_length = seq.mass();
        let (sym, alphabet) = seq.into_parts();
        let n = sym.len();
        assert!(n < NIL as usize, "sequence too long for 32-bit node ids");

        let prev = (0..n)
            .map(|i| if i == 0 { NIL } else { i as u32 - 1 })
            .collect();
        let next = (0..n)
            .map(|i| if i + 1 == n { NIL } else { i as u32 + 1 })
            .collect();

        let mut freq = vec![0usize; alphabet.next_id() as usize];
        for &s in &sym {
            freq[s as usize] += 1;
        }
        let distinct = freq.iter().filter(|&&c| c > 0).count();

        let mut engine = Self {
            sym,
            prev,
            next,
            alive: vec![true; n],
            indexed: vec![false; n],
            head: if n == 0 { NIL } else { 0 },
            len: n,
            original_length,
            alphabet,
            freq,
            distinct,
            pairs: HashMap::new(),
            queue: BTreeSet::new(),
            iteration: 0,
            touched: Vec::new(),
            dirty: Vec::new(),
            dirty_mark: vec![0; n],
            run_mark: vec![0; n],
            done_mark: vec![0; n],
            stamp: 0,
        };
        engine.build_index();
        engine
    }

    fn build_index(&mut self) {
        let n = self.sym.len();
        let mut offset = 0usize;
        for i in 0..n.saturating_sub(1) {
            if i > 0 && self.sym[i - 1] == self.sym[i] {
                offset += 1;
            } else {
                offset = 0;
            }
            if self.sym[i] != self.sym[i + 1] || offset % 2 == 0 {
                self.index_node(i as u32);
            }
        }
        self.refresh_touched();
    }

    fn pair_at(&self, node: u32) -> Pair {
        let nx = self.next[node as usize];
        (self.sym[node as usize], self.sym[nx as usize])
    }

    fn index_node(&mut self, node: u32) {
        debug_assert!(!self.indexed[node as usize]);
        let pair = self.pair_at(node);
        self.pairs.entry(pair).or_default().positions.insert(node);
        self.indexed[node as usize] = true;
        self.touched.push(pair);
    }

    fn unindex_node(&mut self, node: u32) {
        if !self.indexed[node as usize] {
            return;
        }
        let pair = self.pair_at(node);
        let removed = self
            .pairs
            .get_mut(&pair)
            .map(|slot| slot.positions.remove(&node))
            .unwrap_or(false);
        debug_assert!(removed, "index out of sync at node {node}");
        self.indexed[node as usize] = false;
        self.touched.push(pair);
    }

    /// Re-keys every pair whose occurrence set changed since the last call.
    fn refresh_touched(&mut self) {
        let mut touched = std::mem::take(&mut self.touched);
        touched.sort_unstable();
        touched.dedup();
        for &pair in &touched {
            let Some(slot) = self.pairs.get_mut(&pair) else {
                continue;
            };
            if let Some(old) = slot.key.take() {
                self.queue.remove(&old);
            }
            match slot.positions.first() {
                None => {
                    self.pairs.remove(&pair);
                }
                Some(&first) => {
                    let left_scale = self.alphabet.scale_of(pair.0);
                    let key = QueueKey {
                        count: Reverse(slot.positions.len()),
                        pair_scale: left_scale + self.alphabet.scale_of(pair.1),
                        left_scale,
                        first,
                        left: pair.0,
                        right: pair.1,
                    };
                    slot.key = Some(key);
                    self.queue.insert(key);
                }
            }
        }
        touched.clear();
        self.touched = touched;
    }

    fn mark_dirty(&mut self, node: u32) {
        if node != NIL && self.dirty_mark[node as usize] != self.stamp {
            self.dirty_mark[node as usize] = self.stamp;
            self.dirty.push(node);
        }
    }

    fn in_run(&self, node: u32) -> bool {
        let s = self.sym[node as usize];
        let p = self.prev[node as usize];
        let n = self.next[node as usize];
        (p != NIL && self.sym[p as usize] == s) || (n != NIL && self.sym[n as usize] == s)
    }

    fn run_start(&self, node: u32) -> u32 {
        let s = self.sym[node as usize];
        let mut cur = node;
        loop {
            let p = self.prev[cur as usize];
            if p == NIL || self.sym[p as usize] != s {
                return cur;
            }
            cur = p;
        }
    }

    /// Marks every node of the maximal same-symbol run containing `node`.
    fn mark_run(&mut self, node: u32) {
        if node == NIL || self.run_mark[node as usize] == self.stamp || !self.in_run(node) {
            return;
        }
        let s = self.sym[node as usize];
        let mut cur = self.run_start(node);
        while cur != NIL && self.sym[cur as usize] == s {
            self.run_mark[cur as usize] = self.stamp;
            self.mark_dirty(cur);
            cur = self.next[cur as usize];
        }
    }

    /// Indexes a dirty node after mutation, assigning run parity when its
    /// pair repeats one symbol.
    fn reindex(&mut self, node: u32) {
        let i = node as usize;
        if !self.alive[i] || self.done_mark[i] == self.stamp {
            return;
        }
        let nx = self.next[i];
        if nx == NIL {
            self.done_mark[i] = self.stamp;
            return;
        }
        let s = self.sym[i];
        if self.sym[nx as usize] != s {
            self.done_mark[i] = self.stamp;
            self.index_node(node);
            return;
        }
        let mut cur = self.run_start(node);
        let mut offset = 0usize;
        while cur != NIL && self.sym[cur as usize] == s {
            let c = cur as usize;
            debug_assert_eq!(self.dirty_mark[c], self.stamp, "run member {cur} not dirty");
            let n = self.next[c];
            if self.done_mark[c] != self.stamp {
                self.done_mark[c] = self.stamp;
                if n != NIL && (self.sym[n as usize] != s || offset % 2 == 0) {
                    self.index_node(cur);
                }
            }
            offset += 1;
            cur = n;
        }
    }

    fn unlink(&mut self, node: u32) {
        let i = node as usize;
        let (p, n) = (self.prev[i], self.next[i]);
        if p != NIL {
            self.next[p as usize] = n;
        } else {
            self.head = n;
        }
        if n != NIL {
            self.prev[n as usize] = p;
        }
        self.alive[i] = false;
        self.prev[i] = NIL;
        self.next[i] = NIL;
    }

    fn adjust_freq(&mut self, id: SymbolId, delta: isize) {
        let i = id as usize;
        if i >= self.freq.len() {
            self.freq.resize(i + 1, 0);
        }
        let before = self.freq[i];
        let after = before.checked_add_signed(delta).expect("symbol frequency underflow");
        self.freq[i] = after;
        if before == 0 && after > 0 {
            self.distinct += 1;
        } else if before > 0 && after == 0 {
            self.distinct -= 1;
        }
    }
}

impl SubstitutionEngine for IndexedEngine {
    fn len(&self) -> usize {
        self.len
    }

    fn original_length(&self) -> usize {
        self.original_length
    }

    fn is_uniform(&self) -> bool {
        self.distinct <= 1
    }

    fn max_pair_count(&self) -> usize {
        self.queue.first().map_or(0, |k| k.count.0)
    }

    fn step(&mut self) -> Option<SubstitutionStep> {
        let key = *self.queue.first()?;
        let (x, y) = (key.left, key.right);
        let occurrences: Vec<u32> = self.pairs[&(x, y)].positions.iter().copied().collect();
        let z = self.alphabet.next_id();
        let pair_scale = self
            .alphabet
            .insert_pair(z, x, y)
            .expect("fresh symbol id is never registered");

        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            self.dirty_mark.fill(0);
            self.run_mark.fill(0);
            self.done_mark.fill(0);
            self.stamp = 1;
        }
        self.dirty.clear();

        for &p in &occurrences {
            let q = self.next[p as usize];
            self.mark_dirty(self.prev[p as usize]);
            self.mark_dirty(p);
            self.mark_dirty(q);
            self.mark_run(p);
            self.mark_run(q);
        }
        for k in 0..self.dirty.len() {
            let d = self.dirty[k];
            self.unindex_node(d);
        }

        for &p in &occurrences {
            let q = self.next[p as usize];
            debug_assert_eq!((self.sym[p as usize], self.sym[q as usize]), (x, y));
            self.sym[p as usize] = z;
            self.unlink(q);
        }
        let occ = occurrences.len();
        self.adjust_freq(x, -(occ as isize));
        self.adjust_freq(y, -(occ as isize));
        self.adjust_freq(z, occ as isize);

        for k in 0..self.dirty.len() {
            let d = self.dirty[k];
            self.reindex(d);
        }
        self.refresh_touched();

        let length_before = self.len;
        self.len -= occ;
        self.iteration += 1;
        Some(SubstitutionStep {
            iteration: self.iteration,
            pair: (x, y),
            pair_scale,
            new_symbol: z,
            occurrences: occ,
            length_before,
            length_after: self.len,
        })
    }

    fn symbols(&self) -> Vec<SymbolId> {
        let mut out = Vec::with_capacity(self.len);
        let mut cur = self.head;
        while cur != NIL {
            out.push(self.sym[cur as usize]);
            cur = self.next[cur as usize];
        }
        out
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
}
