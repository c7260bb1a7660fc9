use super::{saturate, DecodeOutcome, DecoderConfig, EdgeState, TraceStep, ATANH_MARGIN, TANH_ARG_MAX};
use crate::error::{check_len, Result};
use crate::graph::{syndrome_unchecked, ParityCheckMatrix, TannerGraph};

/// Λ = 0 everywhere; λ′ and λ on edge (c, v) start from the channel LLR `y[v]`.
pub fn spa_init(graph: &TannerGraph, y: &[f64], config: &DecoderConfig) -> Result<EdgeState> {
    check_len(graph.num_vars(), y.len())?;
    let edges = graph.num_edges();
    let prior: Vec<f64> = (0..edges)
        .map(|e| saturate(y[graph.edge_var(e)], config.llr_max))
        .collect();
    Ok(EdgeState {
        to_check: prior.clone(),
        to_var: vec![0.0; edges],
        prior,
        rho: vec![1.0; edges],
        delta: vec![1; edges],
        llr_max: config.llr_max,
    })
}

/// Tanh-rule check update reading λ′ as the incoming messages.
pub fn cn_update(state: &mut EdgeState, graph: &TannerGraph) {
    let llr_max = state.llr_max;
    let mut tanhs = Vec::new();
    let mut scratch = Vec::new();
    for c in 0..graph.num_checks() {
        let edges = graph.check_edges(c);
        tanhs.clear();
        tanhs.extend(
            state.prior[edges.clone()]
                .iter()
                .map(|&l| (l.clamp(-TANH_ARG_MAX, TANH_ARG_MAX) / 2.0).tanh()),
        );
        extrinsic_products(&mut tanhs, &mut scratch);
        for (out, &p) in state.to_var[edges].iter_mut().zip(tanhs.iter()) {
            *out = check_output(p, llr_max);
        }
    }
}

/// Replaces every entry by the product of all other entries, without division.
pub(super) fn extrinsic_products(values: &mut [f64], prefixes: &mut Vec<f64>) {
    prefixes.clear();
    let mut prefix = 1.0;
    for &v in values.iter() {
        prefixes.push(prefix);
        prefix *= v;
    }
    let mut suffix = 1.0;
    for (v, &p) in values.iter_mut().zip(prefixes.iter()).rev() {
        let own = *v;
        *v = p * suffix;
        suffix *= own;
    }
}

#[inline]
pub(super) fn check_output(product: f64, llr_max: f64) -> f64 {
    let limit = 1.0 - ATANH_MARGIN;
    if product >= limit {
        llr_max
    } else if product <= -limit {
        -llr_max
    } else {
        saturate(2.0 * product.atanh(), llr_max)
    }
}

/// Sum of incoming Λ per variable node.
pub(super) fn var_totals(state: &EdgeState, graph: &TannerGraph, totals: &mut Vec<f64>) {
    totals.clear();
    totals.extend((0..graph.num_vars()).map(|v| {
        graph.var_edges(v).iter().map(|&e| state.to_var[e]).sum::<f64>()
    }));
}

/// Check-message sum S entering the update of edge `e`.
#[inline]
pub(super) fn edge_sum(state: &EdgeState, totals: &[f64], var: usize, e: usize, exclusive: bool) -> f64 {
    if exclusive {
        totals[var] - state.to_var[e]
    } else {
        totals[var]
    }
}

/// λ = λ′ + S on every edge.
pub fn vn_update_spa(state: &mut EdgeState, graph: &TannerGraph, config: &DecoderConfig) {
    let mut totals = Vec::new();
    var_totals(state, graph, &mut totals);
    vn_update_spa_with(state, graph, config, &totals);
}

fn vn_update_spa_with(state: &mut EdgeState, graph: &TannerGraph, config: &DecoderConfig, totals: &[f64]) {
    for e in 0..graph.num_edges() {
        let s = edge_sum(state, totals, graph.edge_var(e), e, config.vn_exclusive);
        state.to_check[e] = saturate(state.prior[e] + s, state.llr_max);
    }
}

/// Bit is 1 when `y[v] + ΣΛ ≤ 0`.
pub fn hard_decision(state: &EdgeState, graph: &TannerGraph, y: &[f64]) -> Vec<u8> {
    let mut totals = Vec::new();
    var_totals(state, graph, &mut totals);
    decide(&totals, y)
}

pub(super) fn decide(totals: &[f64], y: &[f64]) -> Vec<u8> {
    totals
        .iter()
        .zip(y)
        .map(|(t, yv)| u8::from(yv + t <= 0.0))
        .collect()
}

/// Shared flooding loop; `reweight` selects the adaptive variable update.
pub(super) fn flooding_decode(
    graph: &TannerGraph,
    h: &ParityCheckMatrix,
    y: &[f64],
    config: &DecoderConfig,
    reweight: bool,
) -> Result<DecodeOutcome> {
    config.validate()?;
    check_len(h.num_vars(), graph.num_vars())?;
    let mut state = spa_init(graph, y, config)?;
    let mut totals = Vec::with_capacity(graph.num_vars());
    let mut trace = config.trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;
    let mut hard_bits = Vec::new();
    for t in 1..=config.t_max {
        iterations = t;
        cn_update(&mut state, graph);
        var_totals(&state, graph, &mut totals);
        if reweight {
            super::arsbp::reweighted_update(&mut state, graph, config, &totals);
        } else {
            vn_update_spa_with(&mut state, graph, config, &totals);
        }
        hard_bits = decide(&totals, y);
        converged = syndrome_unchecked(h, &hard_bits);
        debug_assert!(state.is_saturated_within_bounds());
        if let Some(trace) = trace.as_mut() {
            trace.push(TraceStep {
                iteration: t,
                hard_bits: hard_bits.clone(),
                syndrome_ok: converged,
                state: state.clone(),
            });
        }
        if converged {
            break;
        }
        if t < config.t_max {
            if reweight {
                super::arsbp::refresh_prior(&mut state);
            } else {
                state.prior.copy_from_slice(&state.to_check);
            }
        }
    }
    Ok(DecodeOutcome {
        hard_bits,
        iterations,
        converged,
        trace,
    })
}

/// Flooding sum-product decoding with running priors (λ′ ← λ between iterations).
pub fn spa_decode(
    graph: &TannerGraph,
    h: &ParityCheckMatrix,
    y: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    flooding_decode(graph, h, y, config, false)
}
