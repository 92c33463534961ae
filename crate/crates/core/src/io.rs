//! Series ingestion and the spectrum, trace and sweep file formats.
//!
//! Delimited spectrum files are comma-separated with `# key: value`
//! metadata lines:
//!
//! ```text
//! # tool: compression-spectrum 0.1.0
//! # input: worked.txt
//! # bins: 8
//! # original_length: 10
//! # stop_reason: all-pairs-unique
//! scale,cr,log2_cr
//! 2,1.428571428571429,0.514573172829758
//! 3,1.75,0.807354922057604
//! ```
//!
//! The structured form carries the same numbers as JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::SweepRow;
use crate::error::{Error, Result};
use crate::etc::{StopReason, SubstitutionStep, SymbolId};
use crate::spectrum::{CompressionRatio, CompressionSpectrum};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Decimal places used for every written real unless overridden.
pub const DEFAULT_PRECISION: usize = 15;

pub fn tool_id() -> String {
    format!("{TOOL_NAME} {TOOL_VERSION}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesFormat {
    /// One value per line.
    #[default]
    Plain,
    /// Separated fields; `column` is 0-based. `delimiter: None` splits on
    /// commas, tabs or runs of spaces, whichever the line contains.
    Delimited {
        column: usize,
        delimiter: Option<char>,
    },
}

fn is_skipped(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn split_fields(line: &str, delimiter: Option<char>) -> Vec<&str> {
    match delimiter {
        Some(d) => line.split(d).map(str::trim).collect(),
        None if line.contains(',') => line.split(',').map(str::trim).collect(),
        None if line.contains('\t') => line.split('\t').map(str::trim).collect(),
        None => line.split_whitespace().collect(),
    }
}

/// Parses series text; `origin` only labels errors.
pub fn parse_series(text: &str, format: SeriesFormat, origin: &Path) -> Result<Vec<f64>> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut values = Vec::new();
    let mut seen_header = false;
    for (idx, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        let lineno = idx + 1;
        let field = match format {
            SeriesFormat::Plain => line.trim(),
            SeriesFormat::Delimited { column, delimiter } => {
                let fields = split_fields(line, delimiter);
                *fields.get(column).ok_or_else(|| {
                    parse_err(
                        lineno,
                        format!("column {} missing ({} fields)", column + 1, fields.len()),
                    )
                })?
            }
        };
        let v: f64 = match field.parse() {
            Ok(v) => v,
            // a column-name row ahead of the data
            Err(_) if matches!(format, SeriesFormat::Delimited { .. }) && values.is_empty() && !seen_header => {
                seen_header = true;
                continue;
            }
            Err(_) => return Err(parse_err(lineno, format!("cannot parse {field:?} as a number"))),
        };
        if !v.is_finite() {
            return Err(parse_err(lineno, format!("non-finite value {field:?}")));
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::invalid(format!("{}: no values", origin.display())));
    }
    Ok(values)
}

pub fn read_series(path: &Path, format: SeriesFormat) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_series(&text, format, path)
}

/// Reads integer symbols separated by whitespace or commas, across lines.
pub fn read_symbols(path: &Path) -> Result<Vec<SymbolId>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if is_skipped(line) {
            continue;
        }
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let v = tok.parse::<SymbolId>().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message: format!("not a non-negative integer symbol: {tok:?}"),
            })?;
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(Error::invalid(format!("{}: no symbols", path.display())));
    }
    Ok(out)
}

/// Writes one value per line at full round-trip precision.
pub fn write_series(path: &Path, values: &[f64], header: &[(String, String)]) -> Result<()> {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    for v in values {
        out.push_str(&format!("{v:?}\n"));
    }
    write_text(path, &out)
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Fixed-point rendering with trailing zeros removed.
pub fn format_real(x: f64, decimals: usize) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".to_string()
        } else {
            t.to_string()
        }
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumFormat {
    #[default]
    Delimited,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub tool: String,
    pub input: String,
    /// `None` for pre-quantized symbolic input.
    pub bins: Option<usize>,
    pub original_length: usize,
    pub final_length: usize,
    pub stop_reason: StopReason,
    /// Any further generation or analysis parameters.
    #[serde(default)]
    pub parameters: BTreeMap<String, String>,
}

impl SpectrumMetadata {
    pub fn new(input: impl Into<String>, bins: Option<usize>, trace: &crate::SpectrumTrace) -> Self {
        Self {
            tool: tool_id(),
            input: input.into(),
            bins,
            original_length: trace.original_length,
            final_length: trace.final_length,
            stop_reason: trace.stop_reason,
            parameters: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WriteOptions {
    pub format: SpectrumFormat,
    pub precision: usize,
    /// Adds a `log2_scale` column for log-log plotting.
    pub loglog: bool,
}

impl Default for WriteOptions {
    fn default() -> Self {
        Self {
            format: SpectrumFormat::Delimited,
            precision: DEFAULT_PRECISION,
            loglog: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StructuredPoint {
    scale: usize,
    cr: f64,
    log2_cr: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    log2_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StructuredSpectrum {
    metadata: SpectrumMetadata,
    points: Vec<StructuredPoint>,
}

/// A spectrum read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFile {
    pub metadata: SpectrumMetadata,
    pub spectrum: CompressionSpectrum<f64>,
}

fn metadata_lines(meta: &SpectrumMetadata) -> String {
    let mut out = String::new();
    out.push_str(&format!("# tool: {}\n", meta.tool));
    out.push_str(&format!("# input: {}\n", meta.input));
    match meta.bins {
        Some(b) => out.push_str(&format!("# bins: {b}\n")),
        None => out.push_str("# bins: symbolic\n"),
    }
    out.push_str(&format!("# original_length: {}\n", meta.original_length));
    out.push_str(&format!("# final_length: {}\n", meta.final_length));
    out.push_str(&format!("# stop_reason: {}\n", meta.stop_reason));
    for (k, v) in &meta.parameters {
        out.push_str(&format!("# param.{k}: {v}\n"));
    }
    out
}

pub fn render_spectrum<R: CompressionRatio>(
    spec: &CompressionSpectrum<R>,
    meta: &SpectrumMetadata,
    opts: WriteOptions,
) -> Result<String> {
    let p = opts.precision;
    match opts.format {
        SpectrumFormat::Delimited => {
            let mut out = metadata_lines(meta);
            out.push_str(if opts.loglog {
                "scale,cr,log2_scale,log2_cr\n"
            } else {
                "scale,cr,log2_cr\n"
            });
            for (s, cr) in spec.iter() {
                let crf = cr.to_f64();
                let l = num_traits::ToPrimitive::to_f64(&cr.log2()).unwrap_or(f64::NAN);
                if opts.loglog {
                    out.push_str(&format!(
                        "{s},{},{},{}\n",
                        format_real(crf, p),
                        format_real((s as f64).log2(), p),
                        format_real(l, p)
                    ));
                } else {
                    out.push_str(&format!("{s},{},{}\n", format_real(crf, p), format_real(l, p)));
                }
            }
            Ok(out)
        }
        SpectrumFormat::Structured => {
            let doc = StructuredSpectrum {
                metadata: meta.clone(),
                points: spec
                    .iter()
                    .map(|(s, cr)| StructuredPoint {
                        scale: s,
                        cr: cr.to_f64(),
                        log2_cr: num_traits::ToPrimitive::to_f64(&cr.log2()).unwrap_or(f64::NAN),
                        log2_scale: opts.loglog.then(|| (s as f64).log2()),
                    })
                    .collect(),
            };
            let mut text = serde_json::to_string_pretty(&doc)?;
            text.push('\n');
            Ok(text)
        }
    }
}

pub fn write_spectrum<R: CompressionRatio>(
    path: &Path,
    spec: &CompressionSpectrum<R>,
    meta: &SpectrumMetadata,
    opts: WriteOptions,
) -> Result<()> {
    write_text(path, &render_spectrum(spec, meta, opts)?)
}

/// Parses either spectrum format; JSON is recognised by a leading `{`.
pub fn parse_spectrum(text: &str, origin: &Path) -> Result<SpectrumFile> {
    if text.trim_start().starts_with('{') {
        let doc: StructuredSpectrum = serde_json::from_str(text)?;
        let spectrum = CompressionSpectrum::from_points(
            doc.metadata.original_length,
            doc.points.iter().map(|p| (p.scale, p.cr)),
        )?;
        return Ok(SpectrumFile {
            metadata: doc.metadata,
            spectrum,
        });
    }

    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut header: BTreeMap<String, String> = BTreeMap::new();
    let mut columns: Option<(usize, usize)> = None;
    let mut points = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if let Some(rest) = t.strip_prefix('#') {
            if let Some((k, v)) = rest.split_once(':') {
                header.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let fields: Vec<&str> = t.split(',').map(str::trim).collect();
        let Some((scale_col, cr_col)) = columns else {
            let find = |name: &str| fields.iter().position(|f| *f == name);
            match (find("scale"), find("cr")) {
                (Some(s), Some(c)) => columns = Some((s, c)),
                _ => return Err(parse_err(lineno, "expected a header with scale and cr columns".into())),
            }
            continue;
        };
        let get = |col: usize| {
            fields
                .get(col)
                .copied()
                .ok_or_else(|| parse_err(lineno, format!("missing column {}", col + 1)))
        };
        let scale: usize = get(scale_col)?
            .parse()
            .map_err(|_| parse_err(lineno, "scale is not an integer".into()))?;
        let cr: f64 = get(cr_col)?
            .parse()
            .map_err(|_| parse_err(lineno, "cr is not a number".into()))?;
        points.push((scale, cr));
    }

    let need = |key: &str| {
        header
            .get(key)
            .cloned()
            .ok_or_else(|| Error::invalid(format!("{}: missing header {key:?}", origin.display())))
    };
    let num = |key: &str| -> Result<usize> {
        need(key)?
            .parse()
            .map_err(|_| Error::invalid(format!("{}: header {key:?} is not an integer", origin.display())))
    };
    let original_length = num("original_length")?;
    let bins = match need("bins")?.as_str() {
        "symbolic" => None,
        b => Some(
            b.parse()
                .map_err(|_| Error::invalid(format!("{}: bad bins header", origin.display())))?,
        ),
    };
    let parameters = header
        .iter()
        .filter_map(|(k, v)| k.strip_prefix("param.").map(|k| (k.to_string(), v.clone())))
        .collect();
    let metadata = SpectrumMetadata {
        tool: need("tool")?,
        input: need("input")?,
        bins,
        original_length,
        final_length: num("final_length")?,
        stop_reason: need("stop_reason")?.parse()?,
        parameters,
    };
    let spectrum = CompressionSpectrum::from_points(original_length, points)?;
    Ok(SpectrumFile { metadata, spectrum })
}

pub fn read_spectrum(path: &Path) -> Result<SpectrumFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_spectrum(&text, path)
}

/// Per-iteration table of a substitution trace.
pub fn render_trace(steps: &[SubstitutionStep], precision: usize) -> String {
    let mut out = String::from(
        "iteration,left,right,pair_scale,new_symbol,occurrences,length_before,length_after,cr\n",
    );
    for s in steps {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            s.iteration,
            s.pair.0,
            s.pair.1,
            s.pair_scale,
            s.new_symbol,
            s.occurrences,
            s.length_before,
            s.length_after,
            format_real(s.cr::<f64>(), precision)
        ));
    }
    out
}

pub fn render_sweep(rows: &[SweepRow], header: &[(String, String)], precision: usize) -> String {
    let mut out = String::new();
    for (k, v) in header {
        out.push_str(&format!("# {k}: {v}\n"));
    }
    out.push_str("a,lyapunov,bandwidth\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{}\n",
            format_real(r.a, 12),
            format_real(r.lyapunov, precision),
            r.bandwidth
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> &'static Path {
        Path::new("mem")
    }

    #[test]
    fn plain_series() {
        let v = parse_series("0.71\n0.69\n0.74\n", SeriesFormat::Plain, origin()).unwrap();
        assert_eq!(v, vec![0.71, 0.69, 0.74]);
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let v = parse_series("# rr in s\n\n0.8\n  # x\n0.9\n", SeriesFormat::Plain, origin()).unwrap();
        assert_eq!(v, vec![0.8, 0.9]);
    }

    #[test]
    fn parse_error_names_line() {
        let err = parse_series("0.7\nabc\n", SeriesFormat::Plain, origin()).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e}"),
        }
        assert!(err_display_has_line(parse_series("1\n2\nnan\n", SeriesFormat::Plain, origin()).unwrap_err(), 3));
    }

    fn err_display_has_line(e: Error, line: usize) -> bool {
        e.to_string().contains(&format!("line {line}"))
    }

    #[test]
    fn empty_series_is_an_error() {
        assert!(parse_series("# nothing\n\n", SeriesFormat::Plain, origin()).is_err());
    }

    #[test]
    fn delimited_columns() {
        let text = "1.0,0.8\n2.0,0.82\n";
        let fmt = SeriesFormat::Delimited { column: 1, delimiter: None };
        assert_eq!(parse_series(text, fmt, origin()).unwrap(), vec![0.8, 0.82]);
        let text = "1 0.8\n2\t0.82\n";
        assert_eq!(parse_series(text, fmt, origin()).unwrap(), vec![0.8, 0.82]);
        let fmt = SeriesFormat::Delimited { column: 2, delimiter: Some(';') };
        assert!(parse_series("1;2\n", fmt, origin()).is_err());
    }

    #[test]
    fn real_formatting() {
        assert_eq!(format_real(10.0 / 7.0, 15), "1.428571428571429");
        assert_eq!(format_real(1.75, 15), "1.75");
        assert_eq!(format_real((10.0f64 / 7.0).log2(), 15), "0.514573172829758");
        assert_eq!(format_real(1.75f64.log2(), 15), "0.807354922057604");
        assert_eq!(format_real(2.0, 15), "2");
        assert_eq!(format_real(-1e-20, 15), "0");
    }

    #[test]
    fn missing_header_is_reported() {
        let text = "scale,cr,log2_cr\n2,2,1\n";
        assert!(parse_spectrum(text, origin()).is_err());
    }
}
