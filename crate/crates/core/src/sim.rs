//! Seeded Monte Carlo experiments.
//!
//! Frame `i` of a run draws its message and noise from a ChaCha8 generator
//! seeded with the master seed and switched to stream `i`, so a frame's
//! content depends only on `(seed, i)`. The same frames are therefore seen
//! by every decoder and every iteration budget, and results do not depend on
//! how frames are distributed over worker threads.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{awgn_transmit, bpsk_modulate, llr_compute, ChannelParams};
use crate::decoder::{arsbp_decode, nwrbp_decode, spa_decode, DecoderConfig};
use crate::error::{Error, Result};
use crate::graph::{build_tanner, derive_parity_check, syndrome_unchecked, ParityCheckMatrix, TannerGraph};
use crate::polar::{encode, encode_systematic, extract_data, CodeSpec};
use crate::reference::{dense_bp_decode, sc_decode, scl_decode};

/// Frames decoded per parallel batch; fixed so the stop point never depends on the worker count.
const BATCH: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    Spa,
    Arsbp,
    Nwrbp,
    Sc,
    Scl { list_size: usize },
    DenseBp,
}

impl DecoderKind {
    pub fn is_sparse(&self) -> bool {
        matches!(self, Self::Spa | Self::Arsbp | Self::Nwrbp)
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Spa => f.write_str("spa"),
            Self::Arsbp => f.write_str("arsbp"),
            Self::Nwrbp => f.write_str("nwrbp"),
            Self::Sc => f.write_str("sc"),
            Self::Scl { list_size } => write!(f, "scl{list_size}"),
            Self::DenseBp => f.write_str("densebp"),
        }
    }
}

/// Accepts `spa`, `arsbp`, `nwrbp`, `sc`, `densebp` and `scl` / `scl<L>`;
/// a bare `scl` gets list size 128.
impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "spa" => Self::Spa,
            "arsbp" => Self::Arsbp,
            "nwrbp" => Self::Nwrbp,
            "sc" => Self::Sc,
            "densebp" => Self::DenseBp,
            "scl" => Self::Scl { list_size: 128 },
            other => match other.strip_prefix("scl").and_then(|l| l.parse::<usize>().ok()) {
                Some(list_size) if list_size > 0 => Self::Scl { list_size },
                _ => return Err(Error::Parameter(format!("unknown decoder `{s}`"))),
            },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderSelection {
    pub kind: DecoderKind,
    /// Used by the sparse decoders; dense BP reads only `t_max`.
    pub config: DecoderConfig,
}

impl DecoderSelection {
    pub fn new(kind: DecoderKind, config: DecoderConfig) -> Self {
        Self { kind, config }
    }

    /// Iteration budget reported in results; 0 for the non-iterative decoders.
    pub fn reported_t_max(&self) -> usize {
        match self.kind {
            DecoderKind::Sc | DecoderKind::Scl { .. } => 0,
            _ => self.config.t_max,
        }
    }
}

/// A code together with its parity-check matrix and Tanner graph.
#[derive(Debug, Clone)]
pub struct CodeContext {
    pub spec: CodeSpec,
    pub h: ParityCheckMatrix,
    pub graph: TannerGraph,
    pub systematic: bool,
}

impl CodeContext {
    pub fn new(spec: CodeSpec, systematic: bool) -> Self {
        let h = derive_parity_check(&spec);
        let graph = build_tanner(&h);
        Self {
            spec,
            h,
            graph,
            systematic,
        }
    }

    pub fn encode(&self, data: &[u8]) -> Result<Vec<u8>> {
        if self.systematic {
            encode_systematic(data, &self.spec)
        } else {
            encode(data, &self.spec)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameDecode {
    pub codeword: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
}

pub fn decode_frame(ctx: &CodeContext, sel: &DecoderSelection, y: &[f64]) -> Result<FrameDecode> {
    let sparse = |out: crate::decoder::DecodeOutcome| FrameDecode {
        codeword: out.hard_bits,
        iterations: out.iterations,
        converged: out.converged,
    };
    Ok(match sel.kind {
        DecoderKind::Spa => sparse(spa_decode(&ctx.graph, &ctx.h, y, &sel.config)?),
        DecoderKind::Arsbp => sparse(arsbp_decode(&ctx.graph, &ctx.h, y, &sel.config)?),
        DecoderKind::Nwrbp => sparse(nwrbp_decode(&ctx.graph, &ctx.h, y, &sel.config)?),
        DecoderKind::Sc => FrameDecode {
            codeword: sc_decode(&ctx.spec, y)?,
            iterations: 1,
            converged: true,
        },
        DecoderKind::Scl { list_size } => FrameDecode {
            codeword: scl_decode(&ctx.spec, y, list_size)?,
            iterations: 1,
            converged: true,
        },
        DecoderKind::DenseBp => {
            let out = dense_bp_decode(&ctx.spec, y, sel.config.t_max)?;
            FrameDecode {
                codeword: out.codeword,
                iterations: out.iterations,
                converged: out.converged,
            }
        }
    })
}

/// One transmitted frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub data: Vec<u8>,
    pub codeword: Vec<u8>,
    pub llr: Vec<f64>,
}

/// Deterministic generator for frame `index` of a run seeded with `seed`.
pub fn frame_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn generate_frame(
    ctx: &CodeContext,
    channel: &ChannelParams,
    seed: u64,
    index: u64,
    all_zero: bool,
) -> Result<Frame> {
    let mut rng = frame_rng(seed, index);
    let k = ctx.spec.k();
    let data: Vec<u8> = if all_zero {
        vec![0; k]
    } else {
        let mut data = Vec::with_capacity(k);
        while data.len() < k {
            let word = rng.next_u64();
            data.extend((0..64.min(k - data.len())).map(|b| ((word >> b) & 1) as u8));
        }
        data
    };
    let codeword = ctx.encode(&data)?;
    let received = awgn_transmit(&bpsk_modulate(&codeword), channel.sigma, &mut rng);
    let llr = llr_compute(&received, channel.sigma)?;
    Ok(Frame { data, codeword, llr })
}

/// When to stop a run: whichever configured limit is reached first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub max_frames: Option<u64>,
    pub target_frame_errors: Option<u64>,
}

impl StopRule {
    pub fn frames(n: u64) -> Self {
        Self {
            max_frames: Some(n),
            target_frame_errors: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (self.max_frames, self.target_frame_errors) {
            (None, None) => Err(Error::Parameter("stop rule needs a frame or error limit".into())),
            (Some(0), _) | (_, Some(0)) => Err(Error::Parameter("stop limits must be positive".into())),
            _ => Ok(()),
        }
    }

    fn reached(&self, stats: &AggregateStats) -> bool {
        self.max_frames.is_some_and(|m| stats.frames >= m)
            || self.target_frame_errors.is_some_and(|e| stats.frame_errors >= e)
    }
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_frames: Some(100_000),
            target_frame_errors: Some(200),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub all_zero: bool,
    /// Count errors over all N codeword bits instead of the K data bits.
    pub codeword_ber: bool,
    pub workers: usize,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            all_zero: false,
            codeword_ber: false,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AggregateStats {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub iteration_sum: u64,
    /// Bits compared per frame (K, or N with codeword BER).
    pub bits_per_frame: u64,
}

impl AggregateStats {
    pub fn ber(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.bit_errors as f64 / (self.frames * self.bits_per_frame) as f64
    }

    pub fn fer(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.frame_errors as f64 / self.frames as f64
    }

    pub fn avg_iterations(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        self.iteration_sum as f64 / self.frames as f64
    }

    fn add(&mut self, frame: &FrameStats) {
        self.frames += 1;
        self.bit_errors += frame.bit_errors;
        self.frame_errors += u64::from(frame.bit_errors > 0);
        self.iteration_sum += frame.iterations;
    }

    /// Counter-wise sum of two disjoint runs.
    pub fn merge(&self, other: &Self) -> Self {
        Self {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            frame_errors: self.frame_errors + other.frame_errors,
            iteration_sum: self.iteration_sum + other.iteration_sum,
            bits_per_frame: self.bits_per_frame.max(other.bits_per_frame),
        }
    }
}

struct FrameStats {
    bit_errors: u64,
    iterations: u64,
}

fn run_frame(
    ctx: &CodeContext,
    sel: &DecoderSelection,
    channel: &ChannelParams,
    seed: u64,
    index: u64,
    opts: &SimOptions,
) -> Result<FrameStats> {
    let frame = generate_frame(ctx, channel, seed, index, opts.all_zero)?;
    let out = decode_frame(ctx, sel, &frame.llr)?;
    if out.converged && sel.kind.is_sparse() {
        assert!(syndrome_unchecked(&ctx.h, &out.codeword), "converged frame fails the syndrome");
    }
    let bit_errors = if opts.codeword_ber {
        out.codeword.iter().zip(&frame.codeword).filter(|(a, b)| a != b).count()
    } else {
        let decoded = extract_data(&out.codeword, &ctx.spec, ctx.systematic)?;
        decoded.iter().zip(&frame.data).filter(|(a, b)| a != b).count()
    };
    Ok(FrameStats {
        bit_errors: bit_errors as u64,
        iterations: out.iterations as u64,
    })
}

/// Runs frames `0, 1, 2, …` until the stop rule fires. Statistics are a
/// function of `(ctx, sel, channel, stop, seed, all_zero, codeword_ber)` only.
pub fn run_monte_carlo(
    ctx: &CodeContext,
    sel: &DecoderSelection,
    channel: &ChannelParams,
    stop: &StopRule,
    seed: u64,
    opts: &SimOptions,
) -> Result<AggregateStats> {
    stop.validate()?;
    sel.config.validate()?;
    if opts.workers == 0 {
        return Err(Error::Parameter("worker count must be at least 1".into()));
    }
    let mut stats = AggregateStats {
        bits_per_frame: if opts.codeword_ber { ctx.spec.n() } else { ctx.spec.k() } as u64,
        ..Default::default()
    };
    let pool = if opts.workers > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(opts.workers)
                .build()
                .map_err(|e| Error::Parameter(e.to_string()))?,
        )
    } else {
        None
    };
    let mut next = 0u64;
    while !stop.reached(&stats) {
        let end = match stop.max_frames {
            Some(m) => (next + BATCH).min(m),
            None => next + BATCH,
        };
        let batch: Vec<Result<FrameStats>> = match &pool {
            Some(pool) => pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|i| run_frame(ctx, sel, channel, seed, i, opts))
                    .collect()
            }),
            None => (next..end)
                .map(|i| run_frame(ctx, sel, channel, seed, i, opts))
                .collect(),
        };
        for frame in batch {
            stats.add(&frame?);
            if stop.reached(&stats) {
                break;
            }
        }
        next = end;
    }
    Ok(stats)
}

pub const RESULTS_CSV_HEADER: &str =
    "decoder,N,K,ebn0_db,t_max,beta,frames,bit_errors,frame_errors,ber,fer,avg_iters,seed";

/// One results row matching [`RESULTS_CSV_HEADER`].
pub fn results_csv_row(
    ctx: &CodeContext,
    sel: &DecoderSelection,
    ebn0_db: f64,
    stats: &AggregateStats,
    seed: u64,
) -> String {
    let beta = if sel.kind == DecoderKind::Arsbp { sel.config.beta } else { 0.0 };
    format!(
        "{},{},{},{},{},{},{},{},{},{:.6e},{:.6e},{:.4},{}",
        sel.kind,
        ctx.spec.n(),
        ctx.spec.k(),
        ebn0_db,
        sel.reported_t_max(),
        beta,
        stats.frames,
        stats.bit_errors,
        stats.frame_errors,
        stats.ber(),
        stats.fer(),
        stats.avg_iterations(),
        seed
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polar::construct_frozen_set;

    fn ctx(n: usize, k: usize) -> CodeContext {
        CodeContext::new(construct_frozen_set(n, k, 1.0).unwrap(), false)
    }

    #[test]
    fn decoder_names_round_trip() {
        for name in ["spa", "arsbp", "nwrbp", "sc", "scl32", "densebp"] {
            assert_eq!(name.parse::<DecoderKind>().unwrap().to_string(), name);
        }
        assert_eq!("scl".parse::<DecoderKind>().unwrap(), DecoderKind::Scl { list_size: 128 });
        assert!("scl0".parse::<DecoderKind>().is_err());
        assert!("bp".parse::<DecoderKind>().is_err());
    }

    #[test]
    fn stop_rule_validation() {
        let none = StopRule { max_frames: None, target_frame_errors: None };
        assert!(none.validate().is_err());
        assert!(StopRule::frames(0).validate().is_err());
        assert!(StopRule::default().validate().is_ok());
    }

    #[test]
    fn noiseless_runs_are_clean() {
        let c = ctx(64, 32);
        let channel = ChannelParams::new(2.0, 0.5).unwrap().with_sigma(1e-6).unwrap();
        for kind in [DecoderKind::Spa, DecoderKind::Arsbp, DecoderKind::Nwrbp] {
            let sel = DecoderSelection::new(kind, DecoderConfig::default());
            let s = run_monte_carlo(&c, &sel, &channel, &StopRule::frames(50), 3, &SimOptions::default()).unwrap();
            assert_eq!((s.ber(), s.fer(), s.avg_iterations()), (0.0, 0.0, 1.0), "{kind}");
        }
    }

    #[test]
    fn same_seed_same_stats_any_worker_count() {
        let c = ctx(64, 32);
        let channel = ChannelParams::new(2.0, 0.5).unwrap();
        let sel = DecoderSelection::new(DecoderKind::Arsbp, DecoderConfig::default());
        let stop = StopRule { max_frames: Some(300), target_frame_errors: Some(40) };
        let one = run_monte_carlo(&c, &sel, &channel, &stop, 11, &SimOptions::default()).unwrap();
        let again = run_monte_carlo(&c, &sel, &channel, &stop, 11, &SimOptions::default()).unwrap();
        let many = run_monte_carlo(&c, &sel, &channel, &stop, 11, &SimOptions { workers: 3, ..Default::default() }).unwrap();
        assert_eq!(one, again);
        assert_eq!(one, many);
    }

    #[test]
    fn error_rule_stops_at_target() {
        let c = ctx(32, 16);
        let channel = ChannelParams::new(-1.0, 0.5).unwrap();
        let sel = DecoderSelection::new(DecoderKind::Sc, DecoderConfig::default());
        let stop = StopRule { max_frames: None, target_frame_errors: Some(25) };
        let s = run_monte_carlo(&c, &sel, &channel, &stop, 5, &SimOptions::default()).unwrap();
        assert_eq!(s.frame_errors, 25);
        assert!(s.ber() <= s.fer());
    }

    #[test]
    fn frames_are_shared_across_decoders() {
        let c = ctx(32, 16);
        let channel = ChannelParams::new(1.0, 0.5).unwrap();
        assert_eq!(
            generate_frame(&c, &channel, 7, 12, false).unwrap(),
            generate_frame(&c, &channel, 7, 12, false).unwrap()
        );
        assert_ne!(
            generate_frame(&c, &channel, 7, 12, false).unwrap().llr,
            generate_frame(&c, &channel, 7, 13, false).unwrap().llr
        );
        assert_eq!(generate_frame(&c, &channel, 7, 1, true).unwrap().codeword, vec![0; 32]);
    }

    #[test]
    fn merge_adds_counters() {
        let a = AggregateStats { frames: 3, bit_errors: 4, frame_errors: 1, iteration_sum: 9, bits_per_frame: 8 };
        let m = a.merge(&a);
        assert_eq!((m.frames, m.bit_errors, m.frame_errors, m.iteration_sum), (6, 8, 2, 18));
        assert_eq!(m.ber(), a.ber());
    }
}
