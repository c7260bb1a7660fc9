//! Message-passing decoders on the Tanner graph of a parity-check matrix.
//!
//! All decoders share [`EdgeState`], one slot per edge in the graph's
//! row-major edge order, and report a [`DecodeOutcome`].

mod arsbp;
mod nwrbp;
mod spa;

pub use arsbp::{arsbp_decode, arsbp_vn_update};
pub use nwrbp::nwrbp_decode;
pub use spa::{cn_update, hard_decision, spa_decode, spa_init, vn_update_spa};

use crate::error::{Error, Result};
use crate::LLR_MAX;

/// Lower bound applied to ρ when `clamp_rho` is set.
pub const RHO_EPSILON: f64 = 1e-3;
/// `tanh(x/2)` inputs are clamped to `±TANH_ARG_MAX` before halving.
pub const TANH_ARG_MAX: f64 = 19.0;
/// `atanh` inputs are clamped to `±(1 − ATANH_MARGIN)`.
pub const ATANH_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderConfig {
    /// Maximum number of iterations (iteration-equivalents for NW-RBP).
    pub t_max: usize,
    /// General correction factor β of the reweighting.
    pub beta: f64,
    /// Limit target γ of ρ, used by the diagnostics.
    pub gamma: f64,
    /// Clamp ρ into `[RHO_EPSILON, 1]` before use.
    pub clamp_rho: bool,
    /// Exclude the target edge from the variable-node sum.
    pub vn_exclusive: bool,
    pub llr_max: f64,
    /// Record a per-iteration snapshot of the edge state.
    pub trace: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            t_max: 20,
            beta: 1.0,
            gamma: 1.0,
            clamp_rho: false,
            vn_exclusive: true,
            llr_max: LLR_MAX,
            trace: false,
        }
    }
}

impl DecoderConfig {
    pub fn with_t_max(mut self, t_max: usize) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 {
            return Err(Error::Parameter("t_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Parameter(format!("beta {} is outside [0, 1]", self.beta)));
        }
        if !self.gamma.is_finite() {
            return Err(Error::Parameter("gamma must be finite".into()));
        }
        if !(self.llr_max.is_finite() && self.llr_max > 0.0) {
            return Err(Error::Parameter("llr_max must be positive".into()));
        }
        Ok(())
    }
}

/// Per-edge decoder state.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeState {
    /// λ: variable-to-check messages.
    pub to_check: Vec<f64>,
    /// Λ: check-to-variable messages.
    pub to_var: Vec<f64>,
    /// λ′: running prior fed into the next check-node update.
    pub prior: Vec<f64>,
    /// ρ: reweighting factor of the last variable-node update.
    pub rho: Vec<f64>,
    /// Δ: direction factor of the last variable-node update, ±1.
    pub delta: Vec<i8>,
    pub llr_max: f64,
}

impl EdgeState {
    pub fn num_edges(&self) -> usize {
        self.to_var.len()
    }

    pub fn mean_abs_rho_dev(&self, gamma: f64) -> f64 {
        if self.rho.is_empty() {
            return 0.0;
        }
        self.rho.iter().map(|r| (r - gamma).abs()).sum::<f64>() / self.rho.len() as f64
    }

    /// Smallest and largest value over all λ, Λ and λ′ entries.
    pub fn message_extrema(&self) -> (f64, f64) {
        self.to_check
            .iter()
            .chain(&self.to_var)
            .chain(&self.prior)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
    }

    /// `true` if every message is finite and within `±llr_max`.
    pub fn is_saturated_within_bounds(&self) -> bool {
        self.to_check
            .iter()
            .chain(&self.to_var)
            .chain(&self.prior)
            .all(|x| x.is_finite() && x.abs() <= self.llr_max)
            && self.rho.iter().all(|r| r.is_finite())
    }
}

/// Snapshot taken after the hard decision of one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub iteration: usize,
    pub hard_bits: Vec<u8>,
    pub syndrome_ok: bool,
    pub state: EdgeState,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    pub hard_bits: Vec<u8>,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Option<Vec<TraceStep>>,
}

#[inline]
pub(crate) fn saturate(x: f64, llr_max: f64) -> f64 {
    x.clamp(-llr_max, llr_max)
}

/// sign with sign(0) = +1.
#[inline]
pub(crate) fn sign(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}
