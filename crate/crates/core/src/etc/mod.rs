//! Effort-to-compress engine with scale tracking.
//!
//! A real series is quantized into a [`SymbolicSequence`], then the most
//! frequent adjacent pair is repeatedly replaced by a fresh symbol. Each
//! replacement is recorded as a [`SubstitutionStep`] carrying the scale of
//! the pair (how many original samples it spans) and the lengths before and
//! after. The steps taken until every pair is unique form the
//! [`SpectrumTrace`]; running on until the sequence is constant gives the
//! ETC iteration count.

mod indexed;
mod pairs;
mod sequence;

use serde::{Deserialize, Serialize};

pub use indexed::IndexedEngine;
pub use pairs::{
    count_pairs, select_pair, spectrum_stop, substitute_pair, NaiveEngine, Pair, PairCountTable,
    PairStat,
};
pub use sequence::{quantize, Alphabet, SymbolId, SymbolicSequence};

use crate::error::Result;
use crate::scalar::Scalar;
use crate::spectrum::{CompressionRatio, CompressionSpectrum};

/// Record of one pair substitution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionStep {
    /// 1-based iteration number.
    pub iteration: usize,
    pub pair: Pair,
    pub pair_scale: usize,
    pub new_symbol: SymbolId,
    pub occurrences: usize,
    pub length_before: usize,
    pub length_after: usize,
}

impl SubstitutionStep {
    /// Per-iteration compression ratio, `length_before / length_after`.
    pub fn cr<R: CompressionRatio>(&self) -> R {
        R::from_lengths(self.length_before, self.length_after)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    AllPairsUnique,
    LengthOne,
    AllSymbolsSame,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::AllPairsUnique => "all-pairs-unique",
            StopReason::LengthOne => "length-one",
            StopReason::AllSymbolsSame => "all-symbols-same",
        }
    }
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StopReason {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all-pairs-unique" => Ok(StopReason::AllPairsUnique),
            "length-one" => Ok(StopReason::LengthOne),
            "all-symbols-same" => Ok(StopReason::AllSymbolsSame),
            other => Err(crate::Error::invalid(format!("unknown stop reason {other:?}"))),
        }
    }
}

/// Substitutions that contribute to the compression spectrum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumTrace {
    pub steps: Vec<SubstitutionStep>,
    pub stop_reason: StopReason,
    pub original_length: usize,
    pub final_length: usize,
}

impl SpectrumTrace {
    /// Accumulates the per-step ratios by pair scale.
    pub fn spectrum<R: CompressionRatio>(&self) -> CompressionSpectrum<R> {
        CompressionSpectrum::from_steps(self.original_length, &self.steps)
    }
}

/// Outcome of a full ETC run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtcResult {
    /// Substitutions until the sequence has length one or a single symbol.
    pub iterations: usize,
    /// `iterations / (L - 1)`, zero when `L == 1`.
    pub normalized: f64,
    pub length: usize,
}

impl EtcResult {
    fn new(iterations: usize, length: usize) -> Self {
        let normalized = if length > 1 {
            iterations as f64 / (length - 1) as f64
        } else {
            0.0
        };
        Self {
            iterations,
            normalized,
            length,
        }
    }
}

/// Spectrum phase followed by the remaining ETC iterations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullRun {
    pub spectrum: SpectrumTrace,
    /// Every substitution, spectrum phase included.
    pub steps: Vec<SubstitutionStep>,
    pub stop_reason: StopReason,
    pub final_symbols: Vec<SymbolId>,
}

impl FullRun {
    pub fn etc(&self) -> EtcResult {
        EtcResult::new(self.steps.len(), self.spectrum.original_length)
    }
}

/// Common interface of the naive and indexed engines.
pub trait SubstitutionEngine {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Total scale of the sequence; constant across steps.
    fn original_length(&self) -> usize;

    fn is_uniform(&self) -> bool;

    /// Largest non-overlapping pair count, 0 below length 2.
    fn max_pair_count(&self) -> usize;

    /// Performs one substitution of the selected pair.
    fn step(&mut self) -> Option<SubstitutionStep>;

    fn symbols(&self) -> Vec<SymbolId>;

    fn alphabet(&self) -> &Alphabet;

    /// ETC termination: length one or a single distinct symbol.
    fn etc_halt(&self) -> Option<StopReason> {
        if self.len() <= 1 {
            Some(StopReason::LengthOne)
        } else if self.is_uniform() {
            Some(StopReason::AllSymbolsSame)
        } else {
            None
        }
    }

    /// Spectrum termination: ETC termination or every pair unique.
    fn spectrum_halt(&self) -> Option<StopReason> {
        self.etc_halt().or_else(|| {
            (self.max_pair_count() <= 1).then_some(StopReason::AllPairsUnique)
        })
    }
}

/// Runs `engine` until the spectrum stop rule fires.
pub fn drive_spectrum<E: SubstitutionEngine>(engine: &mut E) -> SpectrumTrace {
    let original_length = engine.original_length();
    let mut steps = Vec::new();
    let stop_reason = loop {
        if let Some(reason) = engine.spectrum_halt() {
            break reason;
        }
        match engine.step() {
            Some(step) => steps.push(step),
            None => break StopReason::AllPairsUnique,
        }
    };
    SpectrumTrace {
        steps,
        stop_reason,
        original_length,
        final_length: engine.len(),
    }
}

/// Continues `engine` until ETC terminates, appending to `steps`.
pub fn drive_etc<E: SubstitutionEngine>(
    engine: &mut E,
    steps: &mut Vec<SubstitutionStep>,
) -> StopReason {
    loop {
        if let Some(reason) = engine.etc_halt() {
            return reason;
        }
        match engine.step() {
            Some(step) => steps.push(step),
            None => unreachable!("a non-uniform sequence of length >= 2 always has a pair"),
        }
    }
}

/// Spectrum trace of an already-symbolic sequence.
pub fn spectrum_trace(seq: SymbolicSequence) -> SpectrumTrace {
    drive_spectrum(&mut IndexedEngine::new(seq))
}

/// ETC count of an already-symbolic sequence.
pub fn etc_count(seq: SymbolicSequence) -> EtcResult {
    let length = seq.len();
    let mut engine = IndexedEngine::new(seq);
    let mut steps = Vec::new();
    drive_etc(&mut engine, &mut steps);
    EtcResult::new(steps.len(), length)
}

/// Spectrum phase then ETC phase on one engine.
pub fn full_run<E: SubstitutionEngine>(mut engine: E) -> FullRun {
    let spectrum = drive_spectrum(&mut engine);
    let mut steps = spectrum.steps.clone();
    let stop_reason = drive_etc(&mut engine, &mut steps);
    FullRun {
        spectrum,
        steps,
        stop_reason,
        final_symbols: engine.symbols(),
    }
}

/// Quantizes `series` and computes its compression spectrum.
pub fn run_spectrum<T: Scalar>(
    series: &[T],
    bins: usize,
) -> Result<(CompressionSpectrum<T>, SpectrumTrace)>
where
    T: CompressionRatio<Real = T>,
{
    let trace = spectrum_trace(quantize(series, bins)?);
    Ok((trace.spectrum(), trace))
}

/// Quantizes `series` and counts ETC iterations.
pub fn run_etc<T: Scalar>(series: &[T], bins: usize) -> Result<EtcResult> {
    Ok(etc_count(quantize(series, bins)?))
}
