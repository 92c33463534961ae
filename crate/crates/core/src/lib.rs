//! Compression spectrum of time series.
//!
//! A series is quantized into symbols and compressed by repeated pair
//! substitution. Every substitution is attributed to the scale of the
//! substituted pair, the number of original samples it covers, and the
//! compression ratios of all substitutions at one scale are multiplied into
//! `CR(s)`. The resulting map from scale to ratio is the compression
//! spectrum.
//!
//! ```
//! use compression_spectrum::{spectrum_trace, ExactSpectrum, SymbolicSequence};
//! use num_rational::BigRational;
//!
//! let trace = spectrum_trace(SymbolicSequence::parse("1121122112").unwrap());
//! let spec: ExactSpectrum = trace.spectrum();
//! assert_eq!(spec.get(2), Some(&BigRational::new(10.into(), 7.into())));
//! assert_eq!(spec.get(3), Some(&BigRational::new(7.into(), 4.into())));
//! ```

pub mod analysis;
pub mod cli;
pub mod error;
pub mod etc;
pub mod io;
pub mod scalar;
pub mod signal;
pub mod spectrum;

pub use analysis::{bandwidth, bifurcation_sweep, fit_line, loglog_fit, LogLogFit, SweepConfig, SweepRow};
pub use error::{Error, Result};
pub use etc::{
    count_pairs, drive_etc, drive_spectrum, etc_count, full_run, quantize, run_etc, run_spectrum, select_pair,
    spectrum_stop, spectrum_trace, substitute_pair, Alphabet, EtcResult, FullRun, IndexedEngine,
    NaiveEngine, PairCountTable, SpectrumTrace, StopReason, SubstitutionEngine,
    SubstitutionStep, SymbolId, SymbolicSequence,
};
pub use scalar::Scalar;
pub use signal::{
    gen_logistic, gen_pink, gen_repeating, gen_sinusoid, gen_uniform, lyapunov_logistic,
    SignalKind, SignalSpec,
};
pub use spectrum::{CompressionRatio, CompressionSpectrum};

/// Spectrum with `f64` ratios.
pub type Spectrum = CompressionSpectrum<f64>;
/// Spectrum with `f32` ratios.
pub type Spectrum32 = CompressionSpectrum<f32>;
/// Spectrum with exact rational ratios.
pub type ExactSpectrum = CompressionSpectrum<num_rational::BigRational>;
pub type Fit = LogLogFit<f64>;
pub type Fit32 = LogLogFit<f32>;
