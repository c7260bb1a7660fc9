//! Adaptive reweighted sparse BP.
//!
//! Every variable-to-check message is scaled by a per-edge factor
//!
//! ```text
//! ρ = 1 − β · ( | |λ′| − |S| | / ( |λ′| + |S| ) ) · Δ,   Δ = sign(λ_prev + S)
//! ```
//!
//! where `S` is the sum of check messages entering the variable node. The
//! prior for the next iteration is `ρ · λ`. With `β = 0` the decoder is
//! identical to [`spa_decode`](super::spa_decode).

use super::spa::{edge_sum, flooding_decode, var_totals};
use super::{saturate, sign, DecodeOutcome, DecoderConfig, EdgeState, RHO_EPSILON};
use crate::error::Result;
use crate::graph::{ParityCheckMatrix, TannerGraph};

/// Reweighting factor for one edge. A zero denominator gives a neutral fraction.
#[inline]
pub(crate) fn reweight_factor(prior: f64, sum: f64, direction: i8, config: &DecoderConfig) -> f64 {
    let (a, b) = (prior.abs(), sum.abs());
    let den = a + b;
    let frac = if den > 0.0 { (a - b).abs() / den } else { 0.0 };
    let rho = 1.0 - config.beta * frac * f64::from(direction);
    if config.clamp_rho {
        rho.clamp(RHO_EPSILON, 1.0)
    } else {
        rho
    }
}

pub(super) fn reweighted_update(
    state: &mut EdgeState,
    graph: &TannerGraph,
    config: &DecoderConfig,
    totals: &[f64],
) {
    for e in 0..graph.num_edges() {
        let s = edge_sum(state, totals, graph.edge_var(e), e, config.vn_exclusive);
        let delta = sign(state.to_check[e] + s);
        let rho = reweight_factor(state.prior[e], s, delta, config);
        state.delta[e] = delta;
        state.rho[e] = rho;
        state.to_check[e] = saturate(rho * (state.prior[e] + s), state.llr_max);
    }
}

/// λ′ ← ρ · λ.
pub(super) fn refresh_prior(state: &mut EdgeState) {
    let llr_max = state.llr_max;
    for ((p, &l), &r) in state.prior.iter_mut().zip(&state.to_check).zip(&state.rho) {
        *p = saturate(r * l, llr_max);
    }
}

/// Reweighted variable-node update: sets Δ, ρ and λ on every edge.
pub fn arsbp_vn_update(state: &mut EdgeState, graph: &TannerGraph, config: &DecoderConfig) {
    let mut totals = Vec::new();
    var_totals(state, graph, &mut totals);
    reweighted_update(state, graph, config, &totals);
}

pub fn arsbp_decode(
    graph: &TannerGraph,
    h: &ParityCheckMatrix,
    y: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    flooding_decode(graph, h, y, config, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{spa_decode, spa_init};
    use crate::graph::{build_tanner, derive_parity_check};
    use crate::polar::construct_frozen_set;
    use proptest::prelude::*;

    #[test]
    fn single_edge_hand_values() {
        // λ′ = 2, S = 1: Δ = +1, fraction 1/3, ρ = 2/3, λ = 2
        let cfg = DecoderConfig::default();
        let delta = sign(2.0 + 1.0);
        assert_eq!(delta, 1);
        let rho = reweight_factor(2.0, 1.0, delta, &cfg);
        assert!((rho - 2.0 / 3.0).abs() < 1e-15);
        assert!((rho * 3.0 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn update_on_two_check_variable() {
        // VN 0 sits in checks 0 and 1; seed Λ so that S toward check 0 is 1.0
        let h = ParityCheckMatrix::new(2, vec![vec![0, 1], vec![0]]).unwrap();
        let g = build_tanner(&h);
        let mut s = spa_init(&g, &[2.0, 2.0], &DecoderConfig::default()).unwrap();
        let e_first = g.var_edges(0)[0];
        let e_second = g.var_edges(0)[1];
        s.to_var[e_first] = 0.0;
        s.to_var[e_second] = 1.0;
        arsbp_vn_update(&mut s, &g, &DecoderConfig::default());
        assert_eq!(s.delta[e_first], 1);
        assert!((s.rho[e_first] - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.to_check[e_first] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_denominator_is_neutral() {
        let cfg = DecoderConfig::default();
        assert_eq!(reweight_factor(0.0, 0.0, 1, &cfg), 1.0);
        assert_eq!(reweight_factor(0.0, -0.0, -1, &cfg), 1.0);
    }

    #[test]
    fn sign_of_zero_is_positive() {
        assert_eq!(sign(0.0), 1);
        assert_eq!(sign(-0.0), 1);
        assert_eq!(sign(-1e-300), -1);
    }

    #[test]
    fn beta_zero_matches_spa_trajectory() {
        let spec = construct_frozen_set(64, 32, 1.0).unwrap();
        let h = derive_parity_check(&spec);
        let g = build_tanner(&h);
        let y: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64 - 3.0) * 0.7).collect();
        let cfg = DecoderConfig::default().with_beta(0.0).with_trace(true);
        let a = arsbp_decode(&g, &h, &y, &cfg).unwrap();
        let b = spa_decode(&g, &h, &y, &cfg).unwrap();
        assert_eq!(a.hard_bits, b.hard_bits);
        assert_eq!(a.iterations, b.iterations);
        for (sa, sb) in a.trace.unwrap().iter().zip(b.trace.unwrap().iter()) {
            assert_eq!(sa.state.to_check, sb.state.to_check);
            assert_eq!(sa.state.to_var, sb.state.to_var);
            assert_eq!(sa.state.prior, sb.state.prior);
            assert!(sa.state.rho.iter().all(|&r| r == 1.0));
        }
    }

    #[test]
    fn zero_input_stays_at_zero() {
        let spec = construct_frozen_set(32, 16, 1.0).unwrap();
        let h = derive_parity_check(&spec);
        let g = build_tanner(&h);
        let cfg = DecoderConfig::default().with_t_max(5).with_trace(true);
        for out in [
            arsbp_decode(&g, &h, &[0.0; 32], &cfg).unwrap(),
            spa_decode(&g, &h, &[0.0; 32], &cfg).unwrap(),
        ] {
            for step in out.trace.unwrap() {
                let st = &step.state;
                assert!(st.to_check.iter().chain(&st.to_var).chain(&st.prior).all(|&x| x == 0.0));
            }
        }
    }

    proptest! {
        #[test]
        fn rho_stays_in_theoretical_band(prior in -30.0f64..30.0, sum in -300.0f64..300.0, beta in 0.0f64..=1.0, neg in any::<bool>()) {
            let cfg = DecoderConfig { beta, ..Default::default() };
            let d = if neg { -1 } else { 1 };
            let rho = reweight_factor(prior, sum, d, &cfg);
            prop_assert!(rho >= 1.0 - beta - 1e-12 && rho <= 1.0 + beta + 1e-12);
            let clamped = reweight_factor(prior, sum, d, &DecoderConfig { clamp_rho: true, ..cfg });
            prop_assert!(clamped > 0.0 && clamped <= 1.0);
        }
    }
}
