use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Identifier of a symbol in a [`SymbolicSequence`].
pub type SymbolId = u32;

/// Symbol table mapping each symbol id to its scale, the number of
/// original samples the symbol expands to.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Alphabet {
    // scales[id] == 0 marks an unregistered id
    scales: Vec<usize>,
    len: usize,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `id` as an initial symbol of scale 1.
    pub fn insert_base(&mut self, id: SymbolId) -> Result<()> {
        self.insert(id, 1)
    }

    fn insert(&mut self, id: SymbolId, scale: usize) -> Result<()> {
        let idx = id as usize;
        if idx >= self.scales.len() {
            self.scales.resize(idx + 1, 0);
        }
        if self.scales[idx] != 0 {
            return Err(Error::SymbolExists(id));
        }
        self.scales[idx] = scale;
        self.len += 1;
        Ok(())
    }

    /// Registers `id` as the symbol standing for the pair `(left, right)`.
    pub fn insert_pair(&mut self, id: SymbolId, left: SymbolId, right: SymbolId) -> Result<usize> {
        let scale = self.pair_scale(left, right)?;
        self.insert(id, scale)?;
        Ok(scale)
    }

    pub fn scale(&self, id: SymbolId) -> Option<usize> {
        match self.scales.get(id as usize) {
            Some(&s) if s > 0 => Some(s),
            _ => None,
        }
    }

    /// Scale of a symbol known to be registered.
    pub(crate) fn scale_of(&self, id: SymbolId) -> usize {
        self.scales[id as usize]
    }

    pub fn pair_scale(&self, left: SymbolId, right: SymbolId) -> Result<usize> {
        let l = self
            .scale(left)
            .ok_or_else(|| Error::invalid(format!("symbol {left} not in alphabet")))?;
        let r = self
            .scale(right)
            .ok_or_else(|| Error::invalid(format!("symbol {right} not in alphabet")))?;
        Ok(l + r)
    }

    pub fn contains(&self, id: SymbolId) -> bool {
        self.scale(id).is_some()
    }

    /// Smallest id above every registered id.
    pub fn next_id(&self) -> SymbolId {
        self.scales.len().max(1) as SymbolId
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, usize)> + '_ {
        self.scales
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > 0)
            .map(|(id, &s)| (id as SymbolId, s))
    }
}

/// A symbol string together with the alphabet that gives each symbol its scale.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicSequence {
    symbols: Vec<SymbolId>,
    alphabet: Alphabet,
}

impl SymbolicSequence {
    /// Wraps an already-symbolic sequence; every distinct id gets scale 1.
    pub fn from_symbols(symbols: Vec<SymbolId>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("empty symbol sequence"));
        }
        let mut alphabet = Alphabet::new();
        for &s in &symbols {
            if !alphabet.contains(s) {
                alphabet.insert_base(s)?;
            }
        }
        Ok(Self { symbols, alphabet })
    }

    pub(crate) fn from_parts(symbols: Vec<SymbolId>, alphabet: Alphabet) -> Self {
        debug_assert!(symbols.iter().all(|&s| alphabet.contains(s)));
        Self { symbols, alphabet }
    }

    /// Parses whitespace- or comma-separated integer symbols, e.g. `"1 1 2"`.
    /// A string without separators is read one digit per symbol, e.g. `"112"`.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim();
        let tokens: Vec<&str> = if trimmed.contains(|c: char| c.is_whitespace() || c == ',') {
            trimmed
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .collect()
        } else {
            trimmed
                .char_indices()
                .map(|(i, c)| &trimmed[i..i + c.len_utf8()])
                .collect()
        };
        let symbols = tokens
            .iter()
            .map(|t| {
                t.parse::<SymbolId>()
                    .map_err(|_| Error::invalid(format!("not a symbol id: {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_symbols(symbols)
    }

    pub fn symbols(&self) -> &[SymbolId] {
        &self.symbols
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Sum of symbol scales, i.e. the length of the original series.
    pub fn mass(&self) -> usize {
        self.symbols.iter().map(|&s| self.alphabet.scale_of(s)).sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.symbols.windows(2).all(|w| w[0] == w[1])
    }

    pub(crate) fn into_parts(self) -> (Vec<SymbolId>, Alphabet) {
        (self.symbols, self.alphabet)
    }
}

impl std::fmt::Display for SymbolicSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let compact = self.symbols.iter().all(|&s| s < 10);
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 && !compact {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Maps a real series onto `bins` equal-width bins spanning `[min, max]`.
///
/// Symbols are 1-indexed; the maximum lands in the top bin and a constant
/// series maps entirely to symbol 1. The alphabet holds all `bins` symbols,
/// used or not, so new pair symbols start at `bins + 1`.
pub fn quantize<T: Scalar>(series: &[T], bins: usize) -> Result<SymbolicSequence> {
    if series.is_empty() {
        return Err(Error::invalid("empty series"));
    }
    if bins < 2 {
        return Err(Error::invalid(format!("bins must be at least 2, got {bins}")));
    }
    if bins > SymbolId::MAX as usize / 2 {
        return Err(Error::invalid(format!("too many bins: {bins}")));
    }
    if let Some(i) = series.iter().position(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("non-finite value at index {i}")));
    }

    let (lo, hi) = series
        .iter()
        .fold((series[0], series[0]), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let range = hi - lo;
    let top = bins - 1;
    let width = T::from_count(bins);

    let symbols = series
        .iter()
        .map(|&x| {
            let bin = if range > T::zero() {
                let pos = (width * (x - lo) / range).floor();
                pos.to_usize().unwrap_or(0).min(top)
            } else {
                0
            };
            (bin + 1) as SymbolId
        })
        .collect();

    let mut alphabet = Alphabet::new();
    for id in 1..=bins as SymbolId {
        alphabet.insert_base(id)?;
    }
    Ok(SymbolicSequence::from_parts(symbols, alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(seq: &SymbolicSequence) -> Vec<u32> {
        seq.symbols().to_vec()
    }

    #[test]
    fn quantize_ramp_into_eight_bins() {
        let x: Vec<f64> = (1..=8).map(f64::from).collect();
        assert_eq!(syms(&quantize(&x, 8).unwrap()), vec![1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn quantize_midpoint_goes_up() {
        assert_eq!(syms(&quantize(&[0.0, 0.5, 1.0], 2).unwrap()), vec![1, 2, 2]);
    }

    #[test]
    fn quantize_constant_series() {
        let q = quantize(&[5.0f32, 5.0, 5.0], 8).unwrap();
        assert_eq!(syms(&q), vec![1, 1, 1]);
        assert_eq!(q.alphabet().next_id(), 9);
    }

    #[test]
    fn quantize_rejects_bad_input() {
        assert!(matches!(quantize::<f64>(&[], 8), Err(Error::InvalidInput(_))));
        assert!(matches!(quantize(&[1.0, f64::NAN], 8), Err(Error::InvalidInput(_))));
        assert!(matches!(quantize(&[1.0, f64::INFINITY], 8), Err(Error::InvalidInput(_))));
        assert!(matches!(quantize(&[1.0, 2.0], 1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn quantize_is_monotone() {
        let x = [0.3, -1.0, 2.5, 0.31, 7.0, 7.0, -0.99];
        let q = quantize(&x, 5).unwrap();
        for i in 0..x.len() {
            for j in 0..x.len() {
                if x[i] <= x[j] {
                    assert!(q.symbols()[i] <= q.symbols()[j]);
                }
            }
        }
    }

    #[test]
    fn parse_compact_and_separated() {
        let a = SymbolicSequence::parse("1121122112").unwrap();
        let b = SymbolicSequence::parse("1 1 2 1 1 2 2 1 1 2").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1121122112");
        assert_eq!(a.alphabet().next_id(), 3);
        assert!(SymbolicSequence::parse("1 x").is_err());
        assert!(SymbolicSequence::parse("").is_err());
    }

    #[test]
    fn alphabet_pair_scales_add() {
        let mut a = Alphabet::new();
        a.insert_base(1).unwrap();
        a.insert_base(2).unwrap();
        assert_eq!(a.insert_pair(3, 1, 1).unwrap(), 2);
        assert_eq!(a.insert_pair(4, 3, 2).unwrap(), 3);
        assert!(matches!(a.insert_pair(4, 1, 1), Err(Error::SymbolExists(4))));
        assert_eq!(a.next_id(), 5);
        assert_eq!(a.len(), 4);
    }
}
