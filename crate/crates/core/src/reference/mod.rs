//! Baseline decoders operating directly on the polar transform.

mod dense_bp;
mod sc;
mod scl;

pub use dense_bp::{dense_bp_decode, DenseBpOutcome};
pub use sc::sc_decode;
pub use scl::scl_decode;

/// Exact check-node combination `2·atanh(tanh(a/2)·tanh(b/2))`, evaluated as
/// `sign(a)sign(b)·min(|a|,|b|) + ln(1+e^{−|a+b|}) − ln(1+e^{−|a−b|})`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let s = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
    let m = a.abs().min(b.abs());
    s * m + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p()
}

/// Variable-node combination after the sibling decision `bit`.
#[inline]
pub(crate) fn g_combine(a: f64, b: f64, bit: u8) -> f64 {
    if bit == 0 {
        b + a
    } else {
        b - a
    }
}
