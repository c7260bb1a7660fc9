//! Polar codes decoded as sparse parity-check codes.
//!
//! The crate builds polar codes from a design SNR, derives an exact
//! parity-check matrix from the frozen columns of the polar transform and runs
//! iterative message-passing decoders on the resulting Tanner graph:
//!
//! - [`decoder::spa_decode`]: flooding sum-product with running priors,
//! - [`decoder::arsbp_decode`]: the adaptive reweighted variant, which scales
//!   every variable-node update by a per-edge factor built from the magnitude
//!   gap between the prior and the aggregated check messages,
//! - [`decoder::nwrbp_decode`]: node-wise residual scheduling.
//!
//! Successive cancellation, list decoding and dense factor-graph BP live in
//! [`reference`]. [`sim`] runs seeded Monte Carlo experiments over BPSK/AWGN.

pub mod channel;
pub mod cli;
pub mod decoder;
pub mod diagnostics;
pub mod error;
pub mod graph;
pub mod polar;
pub mod reference;
pub mod sim;

pub use error::{Error, Result};

/// Saturation bound applied to every LLR message.
pub const LLR_MAX: f64 = 30.0;
