//! Direct, rescan-every-iteration pair operations.
//!
//! These are the reference semantics for pair counting, selection and
//! substitution. [`NaiveEngine`] strings them together; the indexed engine
//! must reproduce its traces exactly.

use std::cmp::Reverse;
use std::collections::BTreeMap;

use super::sequence::{Alphabet, SymbolId, SymbolicSequence};
use super::{SubstitutionEngine, SubstitutionStep};
use crate::error::{Error, Result};

pub type Pair = (SymbolId, SymbolId);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairStat {
    pub count: usize,
    pub first_pos: usize,
}

/// Non-overlapping occurrence counts of adjacent symbol pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCountTable {
    stats: BTreeMap<Pair, PairStat>,
}

impl PairCountTable {
    pub fn get(&self, pair: Pair) -> Option<PairStat> {
        self.stats.get(&pair).copied()
    }

    pub fn count(&self, pair: Pair) -> usize {
        self.get(pair).map_or(0, |s| s.count)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Pair, PairStat)> + '_ {
        self.stats.iter().map(|(&p, &s)| (p, s))
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn max_count(&self) -> usize {
        self.stats.values().map(|s| s.count).max().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.stats.values().map(|s| s.count).sum()
    }

    /// Builds a table from explicit counts; first occurrences follow the
    /// iteration order of `entries`.
    pub fn from_counts(entries: impl IntoIterator<Item = (Pair, usize)>) -> Self {
        let stats = entries
            .into_iter()
            .enumerate()
            .filter(|(_, (_, c))| *c > 0)
            .map(|(i, (p, count))| (p, PairStat { count, first_pos: i }))
            .collect();
        Self { stats }
    }
}

/// Counts adjacent pairs left to right; a run of `k` equal symbols
/// contributes `k / 2` occurrences of the repeated pair.
pub fn count_pairs(seq: &SymbolicSequence) -> Result<PairCountTable> {
    if seq.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: seq.len(),
        });
    }
    Ok(count_symbols(seq.symbols()))
}

fn count_symbols(symbols: &[SymbolId]) -> PairCountTable {
    let mut stats: BTreeMap<Pair, PairStat> = BTreeMap::new();
    // end index (i + 1) of the last counted same-symbol occurrence
    let mut last_same_end: Option<usize> = None;
    for (i, w) in symbols.windows(2).enumerate() {
        let pair = (w[0], w[1]);
        if w[0] == w[1] {
            if last_same_end == Some(i) {
                continue;
            }
            last_same_end = Some(i + 1);
        }
        stats
            .entry(pair)
            .and_modify(|s| s.count += 1)
            .or_insert(PairStat {
                count: 1,
                first_pos: i,
            });
    }
    PairCountTable { stats }
}

/// Ordering key of a candidate pair; the smallest key wins.
pub(crate) fn selection_key(
    stat: PairStat,
    pair: Pair,
    alphabet: &Alphabet,
) -> (Reverse<usize>, usize, usize, usize) {
    let left = alphabet.scale_of(pair.0);
    let right = alphabet.scale_of(pair.1);
    (Reverse(stat.count), left + right, left, stat.first_pos)
}

/// Picks the most frequent pair. Ties go to the smaller pair scale, then the
/// smaller left-symbol scale, then the earliest first occurrence.
pub fn select_pair(table: &PairCountTable, alphabet: &Alphabet) -> Result<Pair> {
    for (p, _) in table.iter() {
        if !alphabet.contains(p.0) || !alphabet.contains(p.1) {
            return Err(Error::invalid(format!("pair {p:?} uses unknown symbols")));
        }
    }
    table
        .iter()
        .min_by_key(|&(p, s)| selection_key(s, p, alphabet))
        .map(|(p, _)| p)
        .ok_or(Error::EmptyTable)
}

/// Replaces every non-overlapping left-to-right occurrence of `pair` by
/// `new_symbol`, registering it with the combined scale.
pub fn substitute_pair(
    seq: &SymbolicSequence,
    pair: Pair,
    new_symbol: SymbolId,
) -> Result<(SymbolicSequence, usize)> {
    let (x, y) = pair;
    let mut alphabet = seq.alphabet().clone();
    alphabet.insert_pair(new_symbol, x, y)?;

    let src = seq.symbols();
    let mut out = Vec::with_capacity(src.len());
    let mut i = 0;
    let mut occurrences = 0;
    while i < src.len() {
        if i + 1 < src.len() && src[i] == x && src[i + 1] == y {
            out.push(new_symbol);
            occurrences += 1;
            i += 2;
        } else {
            out.push(src[i]);
            i += 1;
        }
    }
    if occurrences == 0 {
        return Err(Error::NoOccurrence(x, y));
    }
    Ok((SymbolicSequence::from_parts(out, alphabet), occurrences))
}

/// True once no pair occurs more than once.
pub fn spectrum_stop(table: &PairCountTable) -> bool {
    table.max_count() <= 1
}

/// Engine that recounts every pair on each iteration.
#[derive(Debug, Clone)]
pub struct NaiveEngine {
    seq: SymbolicSequence,
    original_length: usize,
    iteration: usize,
}

impl NaiveEngine {
    pub fn new(seq: SymbolicSequence) -> Self {
        let original_length = seq.mass();
        Self {
            seq,
            original_length,
            iteration: 0,
        }
    }

    pub fn sequence(&self) -> &SymbolicSequence {
        &self.seq
    }
}

impl SubstitutionEngine for NaiveEngine {
    fn len(&self) -> usize {
        self.seq.len()
    }

    fn original_length(&self) -> usize {
        self.original_length
    }

    fn is_uniform(&self) -> bool {
        self.seq.is_uniform()
    }

    fn max_pair_count(&self) -> usize {
        count_symbols(self.seq.symbols()).max_count()
    }

    fn step(&mut self) -> Option<SubstitutionStep> {
        let table = count_pairs(&self.seq).ok()?;
        let pair = select_pair(&table, self.seq.alphabet()).ok()?;
        let new_symbol = self.seq.alphabet().next_id();
        let length_before = self.seq.len();
        let (next, occurrences) = substitute_pair(&self.seq, pair, new_symbol).ok()?;
        self.seq = next;
        self.iteration += 1;
        Some(SubstitutionStep {
            iteration: self.iteration,
            pair,
            pair_scale: self.seq.alphabet().scale_of(new_symbol),
            new_symbol,
            occurrences,
            length_before,
            length_after: self.seq.len(),
        })
    }

    fn symbols(&self) -> Vec<SymbolId> {
        self.seq.symbols().to_vec()
    }

    fn alphabet(&self) -> &Alphabet {
        self.seq.alphabet()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SymbolicSequence {
        SymbolicSequence::parse(s).unwrap()
    }

    fn counts(s: &str) -> Vec<(Pair, usize)> {
        count_pairs(&seq(s))
            .unwrap()
            .iter()
            .map(|(p, st)| (p, st.count))
            .collect()
    }

    #[test]
    fn counts_worked_example() {
        assert_eq!(
            counts("1121122112"),
            vec![((1, 1), 3), ((1, 2), 3), ((2, 1), 2), ((2, 2), 1)]
        );
    }

    #[test]
    fn counts_runs_without_overlap() {
        assert_eq!(counts("111"), vec![((1, 1), 1)]);
        assert_eq!(counts("1111"), vec![((1, 1), 2)]);
        assert_eq!(counts("11111"), vec![((1, 1), 2)]);
        assert_eq!(counts("1212"), vec![((1, 2), 2), ((2, 1), 1)]);
        // two separate runs each contribute floor(k/2)
        assert_eq!(counts("1112111"), vec![((1, 1), 2), ((1, 2), 1), ((2, 1), 1)]);
    }

    #[test]
    fn count_needs_two_symbols() {
        assert!(matches!(
            count_pairs(&seq("1")),
            Err(Error::TooShort { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn first_positions_are_recorded() {
        let t = count_pairs(&seq("1121122112")).unwrap();
        assert_eq!(t.get((1, 1)).unwrap().first_pos, 0);
        assert_eq!(t.get((1, 2)).unwrap().first_pos, 1);
        assert_eq!(t.get((2, 2)).unwrap().first_pos, 5);
    }

    #[test]
    fn select_prefers_earliest_among_equal_scales() {
        let s = seq("1121122112");
        let t = count_pairs(&s).unwrap();
        assert_eq!(select_pair(&t, s.alphabet()).unwrap(), (1, 1));
    }

    fn worked_alphabet() -> Alphabet {
        // 1, 2 base; 3 = 11; 4 = 32; 5 = 24
        let mut a = Alphabet::new();
        a.insert_base(1).unwrap();
        a.insert_base(2).unwrap();
        a.insert_pair(3, 1, 1).unwrap();
        a.insert_pair(4, 3, 2).unwrap();
        a.insert_pair(5, 2, 4).unwrap();
        a
    }

    #[test]
    fn select_prefers_shorter_scale_then_shorter_left() {
        let a = worked_alphabet();
        let t = PairCountTable::from_counts([((4, 4), 1), ((4, 2), 1), ((2, 4), 1)]);
        assert_eq!(select_pair(&t, &a).unwrap(), (2, 4));
    }

    #[test]
    fn select_repeated_pair_over_longer_one() {
        let a = worked_alphabet();
        assert_eq!(a.scale(5), Some(4));
        let t = PairCountTable::from_counts([((4, 4), 1), ((4, 5), 1)]);
        assert_eq!(select_pair(&t, &a).unwrap(), (4, 4));
    }

    #[test]
    fn select_on_empty_table_fails() {
        assert!(matches!(
            select_pair(&PairCountTable::default(), &Alphabet::new()),
            Err(Error::EmptyTable)
        ));
    }

    #[test]
    fn substitute_worked_steps() {
        let (s1, n1) = substitute_pair(&seq("1121122112"), (1, 1), 3).unwrap();
        assert_eq!((s1.to_string().as_str(), n1), ("3232232", 3));
        let (s2, n2) = substitute_pair(&s1, (3, 2), 4).unwrap();
        assert_eq!((s2.to_string().as_str(), n2), ("4424", 3));
        assert_eq!(s2.alphabet().scale(4), Some(3));
        assert_eq!(s2.mass(), 10);
    }

    #[test]
    fn substitute_full_collapse() {
        let (s, n) = substitute_pair(&seq("11"), (1, 1), 2).unwrap();
        assert_eq!(s.symbols(), &[2]);
        assert_eq!(s.alphabet().scale(2), Some(2));
        assert_eq!(n, 1);
    }

    #[test]
    fn substitute_errors() {
        assert!(matches!(
            substitute_pair(&seq("1212"), (2, 2), 3),
            Err(Error::NoOccurrence(2, 2))
        ));
        assert!(matches!(
            substitute_pair(&seq("1212"), (1, 2), 2),
            Err(Error::SymbolExists(2))
        ));
    }

    #[test]
    fn stop_rule() {
        assert!(spectrum_stop(&count_pairs(&seq("4424")).unwrap()));
        assert!(!spectrum_stop(&count_pairs(&seq("3232232")).unwrap()));
        assert!(spectrum_stop(&PairCountTable::default()));
        assert!(spectrum_stop(&count_pairs(&seq("111")).unwrap()));
    }
}
