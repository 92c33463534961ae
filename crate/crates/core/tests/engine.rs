use std::collections::HashMap;

use compression_spectrum::{
    etc_count, full_run, spectrum_trace, CompressionRatio, ExactSpectrum, FullRun,
    IndexedEngine, NaiveEngine, Spectrum, StopReason, SubstitutionEngine, SymbolId,
    SymbolicSequence,
};
use proptest::prelude::*;

fn seq(symbols: Vec<SymbolId>) -> SymbolicSequence {
    SymbolicSequence::from_symbols(symbols).unwrap()
}

/// Recursively expands `sym` using the substitution rules of `run`.
fn expand(sym: SymbolId, rules: &HashMap<SymbolId, (SymbolId, SymbolId)>, out: &mut Vec<SymbolId>) {
    match rules.get(&sym) {
        Some(&(l, r)) => {
            expand(l, rules, out);
            expand(r, rules, out);
        }
        None => out.push(sym),
    }
}

fn rules(run: &FullRun) -> HashMap<SymbolId, (SymbolId, SymbolId)> {
    run.steps.iter().map(|s| (s.new_symbol, s.pair)).collect()
}

#[test]
fn indexed_matches_naive_on_all_ternary_sequences() {
    for len in 1..=7usize {
        for code in 0..3usize.pow(len as u32) {
            let mut c = code;
            let symbols: Vec<u32> = (0..len)
                .map(|_| {
                    let s = (c % 3) as u32 + 1;
                    c /= 3;
                    s
                })
                .collect();
            let a = full_run(IndexedEngine::new(seq(symbols.clone())));
            let b = full_run(NaiveEngine::new(seq(symbols.clone())));
            assert_eq!(a, b, "{symbols:?}");
        }
    }
}

#[test]
fn long_runs_and_alternations() {
    let mut symbols = vec![1u32; 301];
    symbols.extend([2, 1, 2, 1, 2, 2, 2, 2, 1]);
    symbols.extend(std::iter::repeat(3).take(64));
    symbols.extend((0..200).map(|i| 1 + (i % 2)));
    let a = full_run(IndexedEngine::new(seq(symbols.clone())));
    let b = full_run(NaiveEngine::new(seq(symbols)));
    assert_eq!(a, b);
}

#[test]
fn uniform_input_has_empty_spectrum_but_nonzero_length() {
    let t = spectrum_trace(seq(vec![2; 9]));
    assert!(t.steps.is_empty());
    assert_eq!(t.stop_reason, StopReason::AllSymbolsSame);
    assert_eq!(etc_count(seq(vec![2; 9])).iterations, 0);
}

fn symbols_strategy(max_len: usize) -> impl Strategy<Value = Vec<u32>> {
    (1u32..=6).prop_flat_map(move |k| prop::collection::vec(1..=k, 1..=max_len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn engines_agree(symbols in symbols_strategy(120)) {
        let a = full_run(IndexedEngine::new(seq(symbols.clone())));
        let b = full_run(NaiveEngine::new(seq(symbols)));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn mass_is_conserved_every_step(symbols in symbols_strategy(300)) {
        let n = symbols.len();
        let mut e = IndexedEngine::new(seq(symbols));
        loop {
            let mass: usize = e.symbols().iter().map(|&s| e.alphabet().scale(s).unwrap()).sum();
            prop_assert_eq!(mass, n);
            if e.etc_halt().is_some() {
                break;
            }
            let step = e.step().unwrap();
            prop_assert_eq!(step.length_after, step.length_before - step.occurrences);
            prop_assert!(step.occurrences >= 1);
            prop_assert!(step.cr::<f64>() > 1.0);
            prop_assert!(step.pair_scale >= 2);
            prop_assert_eq!(e.len(), step.length_after);
        }
    }

    #[test]
    fn symbols_expand_to_contiguous_blocks(symbols in symbols_strategy(300)) {
        let run = full_run(IndexedEngine::new(seq(symbols.clone())));
        let rules = rules(&run);
        let alphabet_scale: HashMap<u32, usize> = run
            .steps
            .iter()
            .map(|s| (s.new_symbol, s.pair_scale))
            .collect();
        let mut rebuilt = Vec::new();
        for &s in &run.final_symbols {
            let start = rebuilt.len();
            expand(s, &rules, &mut rebuilt);
            let width = rebuilt.len() - start;
            prop_assert_eq!(width, alphabet_scale.get(&s).copied().unwrap_or(1));
        }
        prop_assert_eq!(rebuilt, symbols);
    }

    #[test]
    fn spectrum_log_ratios_sum_to_total_compression(symbols in symbols_strategy(400)) {
        let trace = spectrum_trace(seq(symbols));
        let spec: Spectrum = trace.spectrum();
        let total: f64 = spec.total_log2();
        let want = (trace.original_length as f64 / trace.final_length as f64).log2();
        prop_assert!((total - want).abs() <= 1e-9);

        let exact: ExactSpectrum = trace.spectrum();
        let product = exact
            .iter()
            .fold(CompressionRatio::from_lengths(1, 1), |acc: num_rational::BigRational, (_, r)| acc.compose(r));
        prop_assert_eq!(
            product,
            num_rational::BigRational::from_lengths(trace.original_length, trace.final_length)
        );
    }

    #[test]
    fn relabeling_leaves_spectrum_unchanged(
        symbols in prop::collection::vec(0u32..5, 1..250),
        perm in Just([0u32, 1, 2, 3, 4]).prop_shuffle(),
        offset in 0u32..100,
    ) {
        let relabeled: Vec<u32> = symbols.iter().map(|&s| perm[s as usize] + offset).collect();
        let a: ExactSpectrum = spectrum_trace(seq(symbols)).spectrum();
        let b: ExactSpectrum = spectrum_trace(seq(relabeled)).spectrum();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn runs_are_deterministic(symbols in symbols_strategy(200)) {
        let a = full_run(IndexedEngine::new(seq(symbols.clone())));
        let b = full_run(IndexedEngine::new(seq(symbols)));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn etc_count_covers_spectrum_steps(symbols in symbols_strategy(300)) {
        let run = full_run(IndexedEngine::new(seq(symbols.clone())));
        let etc = etc_count(seq(symbols.clone()));
        prop_assert_eq!(etc.iterations, run.steps.len());
        prop_assert!(etc.iterations >= run.spectrum.steps.len());
        prop_assert!((0.0..=1.0).contains(&etc.normalized));
        if run.final_symbols.len() == 1 {
            let last = run.steps.last().map_or(1, |s| s.pair_scale);
            prop_assert_eq!(last, symbols.len());
        }
    }

    #[test]
    fn spectrum_stop_leaves_unique_pairs(symbols in symbols_strategy(300)) {
        let seqn = seq(symbols);
        let trace = spectrum_trace(seqn.clone());
        let mut e = IndexedEngine::new(seqn);
        for _ in 0..trace.steps.len() {
            e.step();
        }
        match trace.stop_reason {
            StopReason::AllPairsUnique => prop_assert!(e.max_pair_count() <= 1),
            StopReason::AllSymbolsSame => prop_assert!(e.is_uniform()),
            StopReason::LengthOne => prop_assert_eq!(e.len(), 1),
        }
    }
}
