use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use super::http::{serve, AppState};
use super::{ApiError, Limits, DEFAULT_PORT};
use crate::analysis::{estimate_pitch_with, render_bitmap, series, BitBandMatrix, PitchConfig, PitchReference};
use crate::audio::{write_raw, write_wav, AudioSink, SampleChunk, DEFAULT_RATE};
use crate::corpus::presets;
use crate::expr::parse;
use crate::semantics::{eval_ast, render_range, CompileError, Program, SemanticsMode};

#[derive(Debug, Parser)]
#[command(name = "bytebeat", version, about = "Parse, render and analyze bytebeat one-liners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render samples as a WAV file or raw bytes on stdout.
    Render {
        #[command(flatten)]
        range: Range,
        #[arg(short = 'r', long, default_value_t = DEFAULT_RATE)]
        rate: u32,
        /// WAV output path.
        #[arg(short = 'o', long, conflicts_with = "raw", required_unless_present = "raw")]
        output: Option<PathBuf>,
        /// Write headerless unsigned 8-bit samples to stdout.
        #[arg(long)]
        raw: bool,
    },
    /// Print analysis results as JSON.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Plot amplitude against time as a PPM image.
    Plot {
        #[command(flatten)]
        range: Range,
        #[arg(short = 'o', long)]
        output: PathBuf,
    },
    /// List the preset expressions.
    Presets {
        #[arg(long)]
        json: bool,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(short = 'p', long, env = "BB_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, env = "BB_HOST", default_value_t = IpAddr::V4(Ipv4Addr::LOCALHOST))]
        host: IpAddr,
        #[arg(long, env = "BB_MAX_SAMPLES", default_value_t = Limits::default().max_samples)]
        max_samples: u64,
        #[arg(long, env = "BB_MAX_ANALYSIS_SAMPLES", default_value_t = Limits::default().max_analysis_samples)]
        max_analysis_samples: u64,
        #[arg(long, env = "BB_MAX_EXPR_LEN", default_value_t = Limits::default().max_expr_len)]
        max_expr_len: usize,
        #[arg(long, env = "BB_CACHE_CAPACITY", default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
        cache_capacity: u64,
    },
    /// Compare bytecode and tree-walking evaluation speed.
    Bench {
        expr: String,
        #[arg(short = 'm', long, default_value_t = SemanticsMode::C32)]
        mode: SemanticsMode,
        #[arg(short = 'n', long, default_value_t = 1_000_000)]
        n: usize,
    },
}

#[derive(Debug, Args)]
struct Range {
    expr: String,
    #[arg(short = 'm', long, default_value_t = SemanticsMode::C32)]
    mode: SemanticsMode,
    /// Number of samples; one second at the default rate.
    #[arg(short = 'n', long, default_value_t = DEFAULT_RATE as usize)]
    n: usize,
    #[arg(short = 't', long = "t0", default_value_t = 0)]
    t0: u64,
}

#[derive(Debug, Subcommand)]
enum Analysis {
    /// Autocorrelation pitch track, one event per window.
    Pitch {
        #[command(flatten)]
        range: Range,
        #[arg(short = 'r', long, default_value_t = DEFAULT_RATE)]
        rate: u32,
        #[arg(short = 'w', long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(128..))]
        window: u64,
        #[arg(long = "ref", default_value = "a440")]
        reference: PitchReference,
    },
    /// Per-bit duty and toggle counts, one record per window.
    Bits {
        #[command(flatten)]
        range: Range,
        #[arg(short = 'w', long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(2..))]
        window: u64,
    },
    /// Values of an expression at multiples of a stride.
    Series {
        expr: String,
        #[arg(short = 'm', long, default_value_t = SemanticsMode::C32)]
        mode: SemanticsMode,
        #[arg(long, default_value_t = 1024, value_parser = clap::value_parser!(u64).range(1..))]
        stride: u64,
        #[arg(long, default_value_t = 16)]
        count: usize,
    },
}

/// A failure after arguments parsed: either a reportable [`ApiError`]
/// about an expression or an I/O problem.
enum Failure {
    Api { error: ApiError, source: String },
    Io(String),
}

impl Failure {
    fn compile(source: &str) -> impl FnOnce(CompileError) -> Failure + '_ {
        move |e| Failure::Api {
            error: e.into(),
            source: source.to_owned(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<crate::audio::AudioError> for Failure {
    fn from(e: crate::audio::AudioError) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit status: 0 on success, 1 when the expression or a file
/// operation fails, 2 on a usage error.
pub fn cli_main<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                2
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };
    match run(cli.command, stdout) {
        Ok(()) => 0,
        Err(Failure::Api { error, source }) => {
            let _ = writeln!(stderr, "{}", error.with_caret(&source));
            1
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
    }
}

fn compile(range: &Range) -> Result<Program, Failure> {
    Program::from_source(&range.expr, range.mode).map_err(Failure::compile(&range.expr))
}

fn json_line(stdout: &mut dyn Write, value: &impl serde::Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string(value).map_err(|e| Failure::Io(e.to_string()))?;
    writeln!(stdout, "{text}")?;
    Ok(())
}

fn run(command: Command, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Render {
            range,
            rate,
            output,
            raw,
        } => {
            if rate == 0 {
                return Err(Failure::Io("rate must be positive".into()));
            }
            let chunk = render_range(&compile(&range)?, range.t0, range.n).with_rate(rate);
            if raw {
                write_raw(&chunk, stdout)?;
            } else if let Some(path) = output {
                write_wav(&[chunk], rate, &mut AudioSink::create(path)?)?;
            }
        }
        Command::Analyze { what } => analyze(what, stdout)?,
        Command::Plot { range, output } => {
            if range.n == 0 {
                return Err(Failure::Io("plot needs at least one sample".into()));
            }
            let bitmap = render_bitmap(&compile(&range)?, range.t0, range.n);
            let mut sink = AudioSink::create(output)?;
            bitmap.write_ppm(&mut sink)?;
        }
        Command::Presets { json } => {
            if json {
                json_line(stdout, &presets())?;
            } else {
                for p in presets() {
                    let modes: Vec<&str> = p.modes.iter().map(|m| m.name()).collect();
                    let status = serde_json::to_value(p.status).map_err(|e| Failure::Io(e.to_string()))?;
                    writeln!(
                        stdout,
                        "{:<18} {:<13} {:<10} {:<46} {}",
                        p.id,
                        status.as_str().unwrap_or_default(),
                        modes.join(","),
                        p.source,
                        p.credit.unwrap_or("")
                    )?;
                }
            }
        }
        Command::Serve {
            port,
            host,
            max_samples,
            max_analysis_samples,
            max_expr_len,
            cache_capacity,
        } => {
            let limits = Limits {
                max_samples,
                max_analysis_samples,
                max_expr_len,
            };
            let state = AppState::new(limits, cache_capacity as usize);
            let addr = SocketAddr::new(host, port);
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind(addr).await?;
                writeln!(stdout, "listening on http://{}", listener.local_addr()?)?;
                stdout.flush()?;
                serve(listener, state).await
            })?;
        }
        Command::Bench { expr, mode, n } => {
            let program = Program::from_source(&expr, mode).map_err(Failure::compile(&expr))?;
            let ast = parse(&expr).map_err(|e| Failure::compile(&expr)(e.into()))?;

            let start = Instant::now();
            let vm = render_range(&program, 0, n);
            let vm_secs = start.elapsed().as_secs_f64();

            let start = Instant::now();
            let oracle: Vec<u8> = (0..n as u64).map(|t| eval_ast(&ast, t, mode).quantize()).collect();
            let oracle_secs = start.elapsed().as_secs_f64();

            let rate = |secs: f64| if secs > 0.0 { n as f64 / secs } else { f64::INFINITY };
            writeln!(stdout, "vm:      {:>14.0} samples/s", rate(vm_secs))?;
            writeln!(stdout, "oracle:  {:>14.0} samples/s", rate(oracle_secs))?;
            writeln!(stdout, "speedup: {:>14.2}x", oracle_secs / vm_secs.max(f64::MIN_POSITIVE))?;
            if vm.data != oracle {
                return Err(Failure::Io("vm and oracle outputs differ".into()));
            }
        }
    }
    Ok(())
}

fn analyze(what: Analysis, stdout: &mut dyn Write) -> Result<(), Failure> {
    match what {
        Analysis::Pitch {
            range,
            rate,
            window,
            reference,
        } => {
            if rate == 0 {
                return Err(Failure::Io("rate must be positive".into()));
            }
            let program = compile(&range)?;
            let mut data = vec![0u8; range.n];
            program.render_into(range.t0, &mut data);
            let chunk = SampleChunk::new(range.t0, data).with_rate(rate);
            let config = PitchConfig {
                window_len: window as usize,
                reference,
                ..PitchConfig::default()
            };
            json_line(stdout, &estimate_pitch_with(&chunk, &config))
        }
        Analysis::Bits { range, window } => {
            let program = compile(&range)?;
            json_line(stdout, &BitBandMatrix::compute(&program, range.t0, range.n, window as usize))
        }
        Analysis::Series {
            expr,
            mode,
            stride,
            count,
        } => {
            let e = parse(&expr).map_err(|err| Failure::compile(&expr)(err.into()))?;
            let values = series(&e, mode, stride, count).map_err(|err| Failure::compile(&expr)(err.into()))?;
            json_line(stdout, &values)
        }
    }
}
