//! `compspec` command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{bandwidth, bifurcation_sweep, loglog_fit, SweepConfig};
use crate::error::{Error, Result};
use crate::etc::{etc_count, quantize, spectrum_trace, SymbolicSequence};
use crate::io::{
    format_real, read_series, read_spectrum, read_symbols, render_spectrum, render_sweep,
    render_trace, tool_id, write_series, write_text, SeriesFormat, SpectrumFormat,
    SpectrumMetadata, WriteOptions, DEFAULT_PRECISION,
};
use crate::signal::{SignalKind, SignalSpec, DEFAULT_TRANSIENT, DEFAULT_X0};

/// Environment variable overriding the number of written decimals.
pub const PRECISION_ENV: &str = "COMPSPEC_PRECISION";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "compspec", version, about = "Compression spectrum of time series")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a test signal
    Generate(GenerateArgs),
    /// Compute the compression spectrum of a series
    Spectrum(SpectrumArgs),
    /// Count effort-to-compress iterations
    Etc(InputArgs),
    /// Fit a line to a spectrum file in log-log coordinates
    Fit(SpectrumFileArgs),
    /// Logistic-map sweep of Lyapunov exponent and bandwidth
    Sweep(SweepArgs),
    /// Number of compressing scales in a spectrum file
    Bandwidth(SpectrumFileArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    Pattern,
    Sinusoid,
    Logistic,
    Uniform,
    Pink,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated pattern values
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    pattern: Vec<f64>,
    /// Sinusoid frequency in Hz
    #[arg(long, default_value_t = 50.0)]
    frequency: f64,
    /// Sampling rate in Hz
    #[arg(long, default_value_t = 1000.0)]
    sampling_rate: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Logistic map parameter
    #[arg(long, default_value_t = 4.0)]
    a: f64,
    #[arg(long, default_value_t = DEFAULT_X0)]
    x0: f64,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    /// Output file, standard output if omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Series file
    input: PathBuf,
    #[arg(long, default_value_t = 8)]
    bins: usize,
    /// Input is already a sequence of integer symbols
    #[arg(long)]
    symbolic: bool,
    /// 1-based column of a delimited file; plain one-value-per-line if omitted
    #[arg(long)]
    column: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Delimited,
    Structured,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutFormat::Delimited)]
    format: OutFormat,
    /// Also write the per-iteration substitution trace here
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Add a log2 scale column
    #[arg(long)]
    loglog: bool,
}

#[derive(Debug, Args)]
struct SpectrumFileArgs {
    /// Spectrum file written by `spectrum`
    input: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2.9)]
    a_min: f64,
    #[arg(long, default_value_t = 4.0)]
    a_max: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 8)]
    bins: usize,
    #[arg(long, default_value_t = DEFAULT_X0)]
    x0: f64,
    #[arg(long, default_value_t = DEFAULT_TRANSIENT)]
    transient: usize,
    /// Iterates averaged for each Lyapunov exponent
    #[arg(long, default_value_t = 100_000)]
    lyapunov_n: usize,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn precision() -> usize {
    std::env::var(PRECISION_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&p| p <= 17)
        .unwrap_or(DEFAULT_PRECISION)
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_text(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn load_sequence(args: &InputArgs) -> Result<SymbolicSequence> {
    if args.symbolic {
        SymbolicSequence::from_symbols(read_symbols(&args.input)?)
    } else {
        let format = match args.column {
            None => SeriesFormat::Plain,
            Some(0) => return Err(Error::invalid("--column is 1-based")),
            Some(c) => SeriesFormat::Delimited {
                column: c - 1,
                delimiter: None,
            },
        };
        quantize(&read_series(&args.input, format)?, args.bins)
    }
}

fn generate(args: &GenerateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let kind = match args.kind {
        Kind::Pattern => SignalKind::RepeatingPattern {
            pattern: args.pattern.clone(),
        },
        Kind::Sinusoid => SignalKind::Sinusoid {
            frequency: args.frequency,
            sampling_rate: args.sampling_rate,
            amplitude: args.amplitude,
        },
        Kind::Logistic => SignalKind::Logistic {
            a: args.a,
            x0: args.x0,
            transient: args.transient,
        },
        Kind::Uniform => SignalKind::UniformNoise { seed: args.seed },
        Kind::Pink => SignalKind::PinkNoise { seed: args.seed },
    };
    let spec = SignalSpec::new(kind, args.length);
    for w in spec.warnings() {
        let _ = writeln!(err, "warning: {w}");
    }
    let values = spec.generate::<f64>()?;
    let mut header = vec![
        ("tool".to_string(), tool_id()),
        ("signal".to_string(), serde_json::to_string(&spec)?),
    ];
    if let Some(alg) = spec.rng_algorithm() {
        header.push(("rng".to_string(), alg.to_string()));
    }
    match &args.output {
        Some(p) => write_series(p, &values, &header),
        None => {
            let mut text = String::new();
            for (k, v) in &header {
                text.push_str(&format!("# {k}: {v}\n"));
            }
            for v in &values {
                text.push_str(&format!("{v:?}\n"));
            }
            emit(None, &text, out)
        }
    }
}

fn spectrum(args: &SpectrumArgs, out: &mut dyn Write) -> Result<()> {
    let seq = load_sequence(&args.input)?;
    let trace = spectrum_trace(seq);
    let spec = trace.spectrum::<f64>();
    let bins = (!args.input.symbolic).then_some(args.input.bins);
    let mut meta = SpectrumMetadata::new(args.input.input.display().to_string(), bins, &trace);
    if let Some(c) = args.input.column {
        meta.parameters.insert("column".into(), c.to_string());
    }
    meta.parameters.insert("steps".into(), trace.steps.len().to_string());
    let opts = WriteOptions {
        format: match args.format {
            OutFormat::Delimited => SpectrumFormat::Delimited,
            OutFormat::Structured => SpectrumFormat::Structured,
        },
        precision: precision(),
        loglog: args.loglog,
    };
    if let Some(path) = &args.trace {
        write_text(path, &render_trace(&trace.steps, opts.precision))?;
    }
    emit(args.output.as_deref(), &render_spectrum(&spec, &meta, opts)?, out)
}

fn etc(args: &InputArgs, out: &mut dyn Write) -> Result<()> {
    let r = etc_count(load_sequence(args)?);
    let text = format!(
        "iterations: {}\nnormalized: {}\nlength: {}\n",
        r.iterations,
        format_real(r.normalized, precision()),
        r.length
    );
    emit(None, &text, out)
}

fn fit(args: &SpectrumFileArgs, out: &mut dyn Write) -> Result<()> {
    let file = read_spectrum(&args.input)?;
    let f = loglog_fit(&file.spectrum)?;
    let p = precision();
    let text = format!(
        "slope: {}\nintercept: {}\nr_squared: {}\nn_points: {}\n",
        format_real(f.slope, p),
        format_real(f.intercept, p),
        format_real(f.r_squared, p),
        f.n_points
    );
    emit(None, &text, out)
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = SweepConfig {
        a_min: args.a_min,
        a_max: args.a_max,
        step: args.step,
        length: args.length,
        bins: args.bins,
        x0: args.x0,
        transient: args.transient,
        lyapunov_n: args.lyapunov_n,
    };
    let rows = bifurcation_sweep(&cfg)?;
    let header = vec![
        ("tool".to_string(), tool_id()),
        ("sweep".to_string(), serde_json::to_string(&cfg)?),
    ];
    emit(args.output.as_deref(), &render_sweep(&rows, &header, precision()), out)
}

fn bandwidth_cmd(args: &SpectrumFileArgs, out: &mut dyn Write) -> Result<()> {
    let file = read_spectrum(&args.input)?;
    emit(None, &format!("{}\n", bandwidth(&file.spectrum)), out)
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => generate(a, out, err),
        Command::Spectrum(a) => spectrum(a, out),
        Command::Etc(a) => etc(a, out),
        Command::Fit(a) => fit(a, out),
        Command::Sweep(a) => sweep(a, out),
        Command::Bandwidth(a) => bandwidth_cmd(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DATA
        }
    }
}
