//! Flooding BP over the n-stage butterfly graph of `F₂^⊗n`.
//!
//! Column 0 holds the codeword side (channel LLRs), column n the input side
//! (frozen priors). Stage `s` connects columns `s` and `s + 1` through
//! butterflies on index pairs `(i, i + 2^(n−1−s))`, which encode
//! `(a, b) ↦ (a ⊕ b, b)`. The widest butterflies sit next to the channel as in
//! the usual drawing of the polar graph; the reverse order describes the same
//! code but BP on it decodes far worse (FER 0.35 against 0.01 for PC(256,128)
//! at 3 dB).

use super::boxplus;
use crate::error::{check_len, Error, Result};
use crate::polar::{polar_transform, CodeSpec};
use crate::LLR_MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseBpOutcome {
    /// Re-encoded estimate of the input vector; always a codeword.
    pub codeword: Vec<u8>,
    pub iterations: usize,
    /// `true` when the hard input estimate re-encodes to the hard codeword estimate.
    pub converged: bool,
}

/// Message arrays, `(n + 1) × N` each.
struct FactorGraphState {
    /// Messages travelling toward the input side.
    left: Vec<Vec<f64>>,
    /// Messages travelling toward the channel side.
    right: Vec<Vec<f64>>,
}

#[inline]
fn sat(x: f64) -> f64 {
    x.clamp(-LLR_MAX, LLR_MAX)
}

pub fn dense_bp_decode(spec: &CodeSpec, y: &[f64], t_max: usize) -> Result<DenseBpOutcome> {
    check_len(spec.n(), y.len())?;
    if t_max == 0 {
        return Err(Error::Parameter("t_max must be at least 1".into()));
    }
    let n = spec.n();
    let stages = spec.log2_n() as usize;
    let mut fg = FactorGraphState {
        left: vec![vec![0.0; n]; stages + 1],
        right: vec![vec![0.0; n]; stages + 1],
    };
    for (dst, &v) in fg.left[0].iter_mut().zip(y) {
        *dst = sat(v);
    }
    for (i, dst) in fg.right[stages].iter_mut().enumerate() {
        *dst = if spec.is_frozen(i) { LLR_MAX } else { 0.0 };
    }

    let mut u_hat = vec![0u8; n];
    let mut x_hat = vec![0u8; n];
    let mut reencoded = vec![0u8; n];
    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=t_max {
        iterations = t;
        for s in 0..stages {
            let half = 1usize << (stages - 1 - s);
            let (lo, hi) = fg.left.split_at_mut(s + 1);
            let (l_in, l_out) = (&lo[s], &mut hi[0]);
            let r_in = &fg.right[s + 1];
            for i in (0..n).filter(|i| i & half == 0) {
                let j = i + half;
                l_out[i] = sat(boxplus(l_in[i], l_in[j] + r_in[j]));
                l_out[j] = sat(boxplus(l_in[i], r_in[i]) + l_in[j]);
            }
        }
        for s in (0..stages).rev() {
            let half = 1usize << (stages - 1 - s);
            let (lo, hi) = fg.right.split_at_mut(s + 1);
            let (r_out, r_in) = (&mut lo[s], &hi[0]);
            let l_in = &fg.left[s];
            for i in (0..n).filter(|i| i & half == 0) {
                let j = i + half;
                r_out[i] = sat(boxplus(r_in[i], l_in[j] + r_in[j]));
                r_out[j] = sat(boxplus(r_in[i], l_in[i]) + r_in[j]);
            }
        }
        for i in 0..n {
            u_hat[i] = if spec.is_frozen(i) {
                0
            } else {
                u8::from(fg.left[stages][i] + fg.right[stages][i] <= 0.0)
            };
            x_hat[i] = u8::from(fg.left[0][i] + fg.right[0][i] <= 0.0);
        }
        reencoded.copy_from_slice(&u_hat);
        polar_transform(&mut reencoded);
        if reencoded == x_hat {
            converged = true;
            break;
        }
    }
    Ok(DenseBpOutcome {
        codeword: reencoded,
        iterations,
        converged,
    })
}
