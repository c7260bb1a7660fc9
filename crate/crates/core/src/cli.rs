//! The `polarbp` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::channel::ChannelParams;
use crate::decoder::{arsbp_decode, nwrbp_decode, spa_decode, DecodeOutcome, DecoderConfig};
use crate::diagnostics::{
    diagnose_csv_rows, rho_trajectory, trace_csv_rows, DIAGNOSE_CSV_HEADER, TRACE_CSV_HEADER,
};
use crate::graph::{build_tanner, derive_parity_check, GraphStats, ParityCheckMatrix, TannerGraph};
use crate::polar::{construct_frozen_set, CodeSpec};
use crate::sim::{
    decode_frame, generate_frame, results_csv_row, run_monte_carlo, CodeContext, DecoderKind,
    DecoderSelection, SimOptions, StopRule, RESULTS_CSV_HEADER,
};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Runtime(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "polarbp", version, about = "Polar code construction, decoding and simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a code and write its spec file.
    Construct(ConstructArgs),
    /// Encode data bits with a code.
    Encode(EncodeArgs),
    /// Decode frames of channel LLRs.
    Decode(DecodeArgs),
    /// Monte Carlo BER/FER sweep.
    Simulate(SimulateArgs),
    /// Per-iteration convergence diagnostics of the adaptive decoder.
    Diagnose(DiagnoseArgs),
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long = "N")]
    n: usize,
    #[arg(long = "K")]
    k: usize,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    design_snr: f64,
    /// Spec file to write; printed to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write H in alist format.
    #[arg(long)]
    alist: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EncodeArgs {
    #[arg(long)]
    spec: PathBuf,
    /// K data bits as a 0/1 string; spaces and commas are ignored.
    #[arg(long)]
    data: String,
    #[arg(long)]
    systematic: bool,
}

#[derive(Args, Debug, Clone)]
struct DecoderFlags {
    #[arg(long, default_value_t = 20)]
    tmax: usize,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Restrict ρ to [1e-3, 1].
    #[arg(long)]
    clamp_rho: bool,
    /// Let variable nodes include the destination edge's own message.
    #[arg(long)]
    inclusive_vn: bool,
}

impl DecoderFlags {
    fn config(&self) -> CliResult<DecoderConfig> {
        let config = DecoderConfig {
            t_max: self.tmax,
            beta: self.beta,
            clamp_rho: self.clamp_rho,
            vn_exclusive: !self.inclusive_vn,
            ..DecoderConfig::default()
        };
        config.validate().map_err(usage)?;
        Ok(config)
    }
}

#[derive(Args, Debug)]
struct DecodeArgs {
    #[arg(long, required_unless_present = "alist")]
    spec: Option<PathBuf>,
    /// Parity-check matrix in alist format; only the sparse decoders accept it.
    #[arg(long, conflicts_with = "spec")]
    alist: Option<PathBuf>,
    /// LLR file: one frame per line, whitespace-separated.
    #[arg(long)]
    llr: PathBuf,
    #[arg(long, default_value = "arsbp")]
    decoder: String,
    #[command(flatten)]
    flags: DecoderFlags,
    /// List size for `scl`.
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    systematic: bool,
    /// Per-iteration trace CSV (sparse decoders).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Reference codeword(s) for the trace error column, one line per frame.
    #[arg(long, requires = "trace")]
    truth: Option<PathBuf>,
    /// Dump the final edge messages as `check,var,to_check,to_var`.
    #[arg(long)]
    messages: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated decoder names.
    #[arg(long, default_value = "arsbp")]
    decoders: String,
    /// Eb/N0 sweep `start:stop:step` in dB, endpoints included, or a single value.
    #[arg(long, allow_hyphen_values = true)]
    snr: String,
    #[command(flatten)]
    flags: DecoderFlags,
    #[arg(long, default_value_t = 60)]
    dense_tmax: usize,
    #[arg(long, default_value_t = 128)]
    list_size: usize,
    /// 0 disables the limit.
    #[arg(long, default_value_t = 100_000)]
    max_frames: u64,
    /// 0 disables the limit.
    #[arg(long, default_value_t = 200)]
    max_frame_errors: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    all_zero: bool,
    #[arg(long)]
    codeword_ber: bool,
    #[arg(long)]
    systematic: bool,
}

#[derive(Args, Debug)]
struct DiagnoseArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Eb/N0 in dB.
    #[arg(long, allow_negative_numbers = true)]
    snr: f64,
    #[arg(long, default_value_t = 10)]
    frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    flags: DecoderFlags,
    #[arg(long)]
    all_zero: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the command line `args` (program name first) and returns the exit
/// code: 0 on success, 1 for usage errors, 2 for runtime errors.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return u8::from(e.use_stderr());
        }
    };
    let result = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Diagnose(a) => cmd_diagnose(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}

/// Writes through a temporary file in the destination directory so a failed
/// run never leaves a partial file behind.
fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| runtime(format!("{}: {e}", path.display())))?;
    tmp.write_all(contents.as_bytes()).map_err(runtime)?;
    tmp.persist(path).map_err(|e| runtime(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn load_spec(path: &Path) -> CliResult<CodeSpec> {
    read_file(path)?
        .trim()
        .parse()
        .map_err(|e| runtime(format!("{}: {e}", path.display())))
}

fn cmd_construct(a: ConstructArgs) -> CliResult<()> {
    let spec = construct_frozen_set(a.n, a.k, a.design_snr).map_err(usage)?;
    let h = derive_parity_check(&spec);
    let stats = GraphStats::of(&build_tanner(&h));
    if let Some(path) = &a.alist {
        write_atomic(path, &h.to_alist())?;
    }
    match &a.out {
        Some(path) => {
            write_atomic(path, &format!("{spec}\n"))?;
            println!(
                "H rows={} edges={} mean_row_weight={:.4}",
                stats.checks, stats.edges, stats.mean_row_weight
            );
        }
        None => {
            println!("{spec}");
            eprintln!(
                "H rows={} edges={} mean_row_weight={:.4}",
                stats.checks, stats.edges, stats.mean_row_weight
            );
        }
    }
    Ok(())
}

fn parse_bits(text: &str) -> CliResult<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(usage(format!("invalid bit `{other}`"))),
        })
        .collect()
}

fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn cmd_encode(a: EncodeArgs) -> CliResult<()> {
    let spec = load_spec(&a.spec)?;
    let data = parse_bits(&a.data)?;
    let ctx = CodeContext::new(spec, a.systematic);
    let codeword = ctx.encode(&data).map_err(usage)?;
    println!("{}", bits_string(&codeword));
    Ok(())
}

fn parse_llr_file(text: &str, n: usize) -> CliResult<Vec<Vec<f64>>> {
    let mut frames = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| runtime(format!("line {}: invalid number `{t}`", i + 1))))
            .collect::<CliResult<_>>()?;
        if values.len() != n {
            return Err(runtime(format!("line {}: expected {n} values, found {}", i + 1, values.len())));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(runtime(format!("line {}: non-finite value {bad}", i + 1)));
        }
        frames.push(values);
    }
    if frames.is_empty() {
        return Err(runtime("LLR file has no frames"));
    }
    Ok(frames)
}

fn parse_truth_file(text: &str, n: usize) -> CliResult<Vec<Vec<u8>>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let bits = parse_bits(l).map_err(|e| runtime(format!("line {}: {e}", i + 1)))?;
            if bits.len() != n {
                return Err(runtime(format!("line {}: expected {n} bits, found {}", i + 1, bits.len())));
            }
            Ok(bits)
        })
        .collect()
}

fn sparse_decode(
    kind: DecoderKind,
    graph: &TannerGraph,
    h: &ParityCheckMatrix,
    y: &[f64],
    config: &DecoderConfig,
) -> CliResult<DecodeOutcome> {
    match kind {
        DecoderKind::Spa => spa_decode(graph, h, y, config),
        DecoderKind::Arsbp => arsbp_decode(graph, h, y, config),
        DecoderKind::Nwrbp => nwrbp_decode(graph, h, y, config),
        _ => unreachable!("dense decoders are dispatched elsewhere"),
    }
    .map_err(runtime)
}

fn message_dump(graph: &TannerGraph, outcome: &DecodeOutcome, frame: usize, out: &mut String) {
    use std::fmt::Write as _;
    if let Some(step) = outcome.trace.as_ref().and_then(|t| t.last()) {
        for e in 0..graph.num_edges() {
            let _ = writeln!(
                out,
                "{frame},{},{},{},{}",
                graph.edge_check(e),
                graph.edge_var(e),
                step.state.to_check[e],
                step.state.to_var[e]
            );
        }
    }
}

fn cmd_decode(a: DecodeArgs) -> CliResult<()> {
    let mut kind: DecoderKind = a.decoder.parse().map_err(usage)?;
    if let (DecoderKind::Scl { .. }, Some(l)) = (kind, a.list_size) {
        if l == 0 {
            return Err(usage("list size must be positive"));
        }
        kind = DecoderKind::Scl { list_size: l };
    }
    let wants_trace = a.trace.is_some() || a.messages.is_some();
    if wants_trace && !kind.is_sparse() {
        return Err(usage("--trace and --messages need a sparse decoder (spa, arsbp, nwrbp)"));
    }
    let config = a.flags.config()?.with_trace(wants_trace);

    let (ctx, h, graph) = match (&a.spec, &a.alist) {
        (Some(path), _) => {
            let ctx = CodeContext::new(load_spec(path)?, a.systematic);
            let (h, g) = (ctx.h.clone(), ctx.graph.clone());
            (Some(ctx), h, g)
        }
        (None, Some(path)) => {
            if !kind.is_sparse() {
                return Err(usage(format!("decoder `{kind}` needs --spec")));
            }
            let h = ParityCheckMatrix::from_alist(&read_file(path)?)
                .map_err(|e| runtime(format!("{}: {e}", path.display())))?;
            let g = build_tanner(&h);
            (None, h, g)
        }
        (None, None) => return Err(usage("either --spec or --alist is required")),
    };
    let frames = parse_llr_file(&read_file(&a.llr)?, graph.num_vars())?;
    let truth = match &a.truth {
        Some(path) => {
            let t = parse_truth_file(&read_file(path)?, graph.num_vars())?;
            if t.len() != frames.len() && t.len() != 1 {
                return Err(runtime(format!(
                    "{}: {} reference words for {} frames",
                    path.display(),
                    t.len(),
                    frames.len()
                )));
            }
            Some(t)
        }
        None => None,
    };

    let mut trace_csv = format!("{TRACE_CSV_HEADER}\n");
    let mut messages = String::from("frame,check,var,to_check,to_var\n");
    let mut stdout = String::new();
    for (i, y) in frames.iter().enumerate() {
        let (bits, iterations, converged) = if kind.is_sparse() {
            let out = sparse_decode(kind, &graph, &h, y, &config)?;
            if let Some(trace) = &out.trace {
                let reference = truth.as_ref().map(|t| t[i.min(t.len() - 1)].as_slice());
                trace_csv.push_str(&trace_csv_rows(trace, reference));
            }
            message_dump(&graph, &out, i, &mut messages);
            (out.hard_bits, out.iterations, out.converged)
        } else {
            let ctx = ctx.as_ref().expect("spec present for dense decoders");
            let sel = DecoderSelection::new(kind, config.clone());
            let out = decode_frame(ctx, &sel, y).map_err(runtime)?;
            (out.codeword, out.iterations, out.converged)
        };
        stdout.push_str(&format!(
            "{} iterations={iterations} converged={converged}\n",
            bits_string(&bits)
        ));
    }
    if let Some(path) = &a.trace {
        write_atomic(path, &trace_csv)?;
    }
    if let Some(path) = &a.messages {
        write_atomic(path, &messages)?;
    }
    print!("{stdout}");
    Ok(())
}

fn round_db(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

fn parse_sweep(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| -> CliResult<f64> {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| usage(format!("invalid SNR value `{s}`")))
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
            if step <= 0.0 {
                return Err(usage("SNR step must be positive"));
            }
            if stop < start {
                return Err(usage("SNR stop is below start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| round_db(start + i as f64 * step)).collect())
        }
        _ => Err(usage(format!("SNR sweep `{text}` is not start:stop:step"))),
    }
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let config = a.flags.config()?;
    let dense = DecoderConfig {
        t_max: a.dense_tmax,
        ..config.clone()
    };
    dense.validate().map_err(usage)?;
    if a.list_size == 0 {
        return Err(usage("list size must be positive"));
    }
    let mut selections = Vec::new();
    for name in a.decoders.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let mut kind: DecoderKind = name.parse().map_err(usage)?;
        if name == "scl" {
            kind = DecoderKind::Scl { list_size: a.list_size };
        }
        let cfg = if kind == DecoderKind::DenseBp { dense.clone() } else { config.clone() };
        selections.push(DecoderSelection::new(kind, cfg));
    }
    if selections.is_empty() {
        return Err(usage("no decoders given"));
    }
    let points = parse_sweep(&a.snr)?;
    let stop = StopRule {
        max_frames: (a.max_frames > 0).then_some(a.max_frames),
        target_frame_errors: (a.max_frame_errors > 0).then_some(a.max_frame_errors),
    };
    stop.validate().map_err(usage)?;
    if a.workers == 0 {
        return Err(usage("worker count must be at least 1"));
    }
    let opts = SimOptions {
        all_zero: a.all_zero,
        codeword_ber: a.codeword_ber,
        workers: a.workers,
    };
    let ctx = CodeContext::new(load_spec(&a.spec)?, a.systematic);
    let channels = points
        .iter()
        .map(|&snr| ChannelParams::new(snr, ctx.spec.rate()).map_err(usage))
        .collect::<CliResult<Vec<_>>>()?;

    let mut csv = format!("{RESULTS_CSV_HEADER}\n");
    for sel in &selections {
        for (&snr, channel) in points.iter().zip(&channels) {
            let stats = run_monte_carlo(&ctx, sel, channel, &stop, a.seed, &opts).map_err(runtime)?;
            csv.push_str(&results_csv_row(&ctx, sel, snr, &stats, a.seed));
            csv.push('\n');
        }
    }
    emit(a.out.as_deref(), &csv)
}

fn cmd_diagnose(a: DiagnoseArgs) -> CliResult<()> {
    let config = a.flags.config()?.with_trace(true);
    if a.frames == 0 {
        return Err(usage("frame count must be positive"));
    }
    let ctx = CodeContext::new(load_spec(&a.spec)?, false);
    let channel = ChannelParams::new(a.snr, ctx.spec.rate()).map_err(usage)?;

    let mut csv = format!("{DIAGNOSE_CSV_HEADER}\n");
    let (mut converged, mut multi, mut trend_ok) = (0u64, 0u64, 0u64);
    let (mut rho_min, mut rho_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..a.frames {
        let frame = generate_frame(&ctx, &channel, a.seed, i, a.all_zero).map_err(runtime)?;
        let out = arsbp_decode(&ctx.graph, &ctx.h, &frame.llr, &config).map_err(runtime)?;
        let trace = out.trace.as_deref().unwrap_or_default();
        csv.push_str(&diagnose_csv_rows(trace, &ctx.graph, config.gamma));
        for step in trace {
            for &r in &step.state.rho {
                rho_min = rho_min.min(r);
                rho_max = rho_max.max(r);
            }
        }
        let report = rho_trajectory(out.trace.as_deref(), &ctx.graph, config.gamma).map_err(runtime)?;
        if out.converged {
            converged += 1;
            if let Some(below) = report.final_below_first {
                multi += 1;
                trend_ok += u64::from(below);
            }
        }
    }
    emit(a.out.as_deref(), &csv)?;
    let summary = format!(
        "frames={} converged={converged} multi_iteration_converged={multi} rho_decreasing={trend_ok} rho_min={rho_min:.6} rho_max={rho_max:.6}",
        a.frames
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}
