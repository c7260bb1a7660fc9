//! Convergence measurements over decoder snapshots.
//!
//! Both conditions are evaluated per variable node after normalising that
//! node's message magnitudes to unit sum; nodes whose messages are all zero
//! are skipped. For an edge `e = (v, c)`:
//!
//! - row sum: `(Σ_{u ∈ N(v)∖c} ρ_u + (1 − ρ_V)) · |λⁿ_e|` with `ρ_V = Σ_{u ∈ N(v)} ρ_u`,
//! - column sum: `ρ_C · Σ_{u ∈ N(v)∖c} |Λⁿ_u| + (1 − ρ_C) · |Λⁿ_e|`.
//!
//! A condition holds when its maximum over edges is below 1; the margin is
//! that maximum minus 1, or −1 when no edge qualifies.

use std::fmt::Write as _;

use crate::decoder::{EdgeState, TraceStep};
use crate::error::{Error, Result};
use crate::graph::TannerGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub row_sum_margin: f64,
    pub column_sum_margin: f64,
    pub row_sum_satisfied: bool,
    pub column_sum_satisfied: bool,
    /// Mean `|ρ − γ|` over edges, one entry per traced iteration.
    pub rho_deviation_series: Vec<f64>,
    /// Whether the last entry of the series is below the first; `None` for single-iteration traces.
    pub final_below_first: Option<bool>,
    pub gamma: f64,
}

fn margin_over_vars(
    graph: &TannerGraph,
    messages: &[f64],
    mut lhs: impl FnMut(&[usize], usize, f64, f64) -> f64,
) -> (bool, f64) {
    let mut worst = f64::NEG_INFINITY;
    for v in 0..graph.num_vars() {
        let edges = graph.var_edges(v);
        let norm: f64 = edges.iter().map(|&e| messages[e].abs()).sum();
        if norm == 0.0 {
            continue;
        }
        let total: f64 = edges.iter().map(|&e| messages[e].abs() / norm).sum();
        for &e in edges {
            worst = worst.max(lhs(edges, e, messages[e].abs() / norm, total));
        }
    }
    if worst == f64::NEG_INFINITY {
        return (true, -1.0);
    }
    let margin = worst - 1.0;
    (margin < 0.0, margin)
}

/// Row-sum condition on the variable-to-check messages and ρ.
pub fn check_row_sum(state: &EdgeState, graph: &TannerGraph) -> (bool, f64) {
    margin_over_vars(graph, &state.to_check, |edges, e, normalized, _| {
        let rho_v: f64 = edges.iter().map(|&u| state.rho[u]).sum();
        let others = rho_v - state.rho[e];
        (others + (1.0 - rho_v)) * normalized
    })
}

/// Column-sum condition on the check-to-variable messages with `ρ_C = 1`.
pub fn check_column_sum(state: &EdgeState, graph: &TannerGraph) -> (bool, f64) {
    check_column_sum_with(state, graph, 1.0)
}

pub fn check_column_sum_with(state: &EdgeState, graph: &TannerGraph, rho_c: f64) -> (bool, f64) {
    margin_over_vars(graph, &state.to_var, |_, _, normalized, total| {
        rho_c * (total - normalized) + (1.0 - rho_c) * normalized
    })
}

/// Summarises a traced decode: margins at the last iteration and the ρ
/// deviation per iteration.
pub fn rho_trajectory(trace: Option<&[TraceStep]>, graph: &TannerGraph, gamma: f64) -> Result<ConvergenceReport> {
    let trace = trace.ok_or_else(|| Error::Parameter("decode was run without tracing".into()))?;
    let last = trace
        .last()
        .ok_or_else(|| Error::Parameter("trace is empty".into()))?;
    let series: Vec<f64> = trace.iter().map(|s| s.state.mean_abs_rho_dev(gamma)).collect();
    let (row_ok, row) = check_row_sum(&last.state, graph);
    let (col_ok, col) = check_column_sum(&last.state, graph);
    let final_below_first = (series.len() >= 2).then(|| series[series.len() - 1] < series[0]);
    Ok(ConvergenceReport {
        row_sum_margin: row,
        column_sum_margin: col,
        row_sum_satisfied: row_ok,
        column_sum_satisfied: col_ok,
        rho_deviation_series: series,
        final_below_first,
        gamma,
    })
}

pub const DIAGNOSE_CSV_HEADER: &str = "iter,row_margin,col_margin,mean_abs_rho_dev,syndrome_ok";
pub const TRACE_CSV_HEADER: &str = "iter,mean_abs_rho_minus_1,bit_errors_vs_truth,syndrome_ok";

/// Rows of the `diagnose` CSV for one traced frame (no header).
pub fn diagnose_csv_rows(trace: &[TraceStep], graph: &TannerGraph, gamma: f64) -> String {
    let mut out = String::new();
    for step in trace {
        let (_, row) = check_row_sum(&step.state, graph);
        let (_, col) = check_column_sum(&step.state, graph);
        let _ = writeln!(
            out,
            "{},{:.6e},{:.6e},{:.6e},{}",
            step.iteration,
            row,
            col,
            step.state.mean_abs_rho_dev(gamma),
            u8::from(step.syndrome_ok)
        );
    }
    out
}

/// Rows of the per-iteration trace CSV; the error column is empty without a reference word.
pub fn trace_csv_rows(trace: &[TraceStep], truth: Option<&[u8]>) -> String {
    let mut out = String::new();
    for step in trace {
        let errors = truth.map_or(String::new(), |t| {
            t.iter().zip(&step.hard_bits).filter(|(a, b)| a != b).count().to_string()
        });
        let _ = writeln!(
            out,
            "{},{:.6e},{},{}",
            step.iteration,
            step.state.mean_abs_rho_dev(1.0),
            errors,
            u8::from(step.syndrome_ok)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::decoder::{arsbp_decode, spa_init, DecoderConfig};
    use crate::polar::CodeSpec;
    use crate::sim::{generate_frame, CodeContext};

    fn pc84() -> CodeContext {
        CodeContext::new(CodeSpec::from_frozen(8, &[0, 1, 2, 4], 0.0).unwrap(), false)
    }

    // Literal evaluation: explicit sums over N(v)∖c, no shared helpers.
    fn row_oracle(state: &EdgeState, graph: &TannerGraph) -> f64 {
        let mut worst: Option<f64> = None;
        for v in 0..graph.num_vars() {
            let edges = graph.var_edges(v);
            let norm: f64 = edges.iter().map(|&e| state.to_check[e].abs()).sum();
            if norm == 0.0 {
                continue;
            }
            for &e in edges {
                let mut sum_others = 0.0;
                let mut rho_v = 0.0;
                for &u in edges {
                    rho_v += state.rho[u];
                    if u != e {
                        sum_others += state.rho[u];
                    }
                }
                let val = (sum_others + 1.0 - rho_v) * state.to_check[e].abs() / norm;
                worst = Some(worst.map_or(val, |w: f64| w.max(val)));
            }
        }
        worst.map_or(-1.0, |w| w - 1.0)
    }

    fn col_oracle(state: &EdgeState, graph: &TannerGraph) -> f64 {
        let mut worst: Option<f64> = None;
        for v in 0..graph.num_vars() {
            let edges = graph.var_edges(v);
            let norm: f64 = edges.iter().map(|&e| state.to_var[e].abs()).sum();
            if norm == 0.0 {
                continue;
            }
            for &e in edges {
                let mut s = 0.0;
                for &u in edges {
                    if u != e {
                        s += state.to_var[u].abs() / norm;
                    }
                }
                worst = Some(worst.map_or(s, |w: f64| w.max(s)));
            }
        }
        worst.map_or(-1.0, |w| w - 1.0)
    }

    #[test]
    fn unit_rho_satisfies_row_sum() {
        let c = pc84();
        let y = [1.0, -2.0, 0.5, 3.0, -0.1, 2.2, 1.7, -0.9];
        let s = spa_init(&c.graph, &y, &DecoderConfig::default()).unwrap();
        let (ok, margin) = check_row_sum(&s, &c.graph);
        assert!(ok);
        assert!((margin + 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_messages_give_margin_minus_one() {
        let c = pc84();
        let s = spa_init(&c.graph, &[0.0; 8], &DecoderConfig::default()).unwrap();
        assert_eq!(check_row_sum(&s, &c.graph), (true, -1.0));
        assert_eq!(check_column_sum(&s, &c.graph), (true, -1.0));
    }

    #[test]
    fn mid_decode_margins_match_oracle() {
        let c = pc84();
        let ch = ChannelParams::new(2.0, c.spec.rate()).unwrap();
        let cfg = DecoderConfig::default().with_t_max(6).with_trace(true);
        let mut checked = 0;
        for i in 0..40 {
            let f = generate_frame(&c, &ch, 21, i, false).unwrap();
            let out = arsbp_decode(&c.graph, &c.h, &f.llr, &cfg).unwrap();
            for step in out.trace.unwrap() {
                let (_, row) = check_row_sum(&step.state, &c.graph);
                let (_, col) = check_column_sum(&step.state, &c.graph);
                assert!((row - row_oracle(&step.state, &c.graph)).abs() < 1e-12);
                assert!((col - col_oracle(&step.state, &c.graph)).abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 40);
    }

    #[test]
    fn column_sum_under_unit_rho_c() {
        let c = pc84();
        let y = [1.0, -2.0, 0.5, 3.0, -0.1, 2.2, 1.7, -0.9];
        let mut s = spa_init(&c.graph, &y, &DecoderConfig::default()).unwrap();
        crate::decoder::cn_update(&mut s, &c.graph);
        let (ok, margin) = check_column_sum(&s, &c.graph);
        assert!(ok, "margin {margin}");
        assert!((-1.0..0.0).contains(&margin));
    }

    #[test]
    fn beta_zero_has_flat_trajectory() {
        let c = pc84();
        let ch = ChannelParams::new(1.0, c.spec.rate()).unwrap();
        let cfg = DecoderConfig::default().with_beta(0.0).with_trace(true);
        let f = generate_frame(&c, &ch, 3, 0, false).unwrap();
        let out = arsbp_decode(&c.graph, &c.h, &f.llr, &cfg).unwrap();
        let report = rho_trajectory(out.trace.as_deref(), &c.graph, 1.0).unwrap();
        assert!(report.rho_deviation_series.iter().all(|&d| d == 0.0));
        assert_eq!(report.rho_deviation_series.len(), out.iterations);
    }

    #[test]
    fn missing_trace_is_an_error() {
        let c = pc84();
        assert!(rho_trajectory(None, &c.graph, 1.0).is_err());
    }

    #[test]
    fn observers_do_not_mutate() {
        let c = pc84();
        let cfg = DecoderConfig::default().with_trace(true).with_t_max(3);
        let y = [0.3, -0.2, 0.5, 0.1, -0.1, 0.2, 0.7, -0.4];
        let out = arsbp_decode(&c.graph, &c.h, &y, &cfg).unwrap();
        let trace = out.trace.unwrap();
        let before = trace.clone();
        let _ = rho_trajectory(Some(&trace), &c.graph, 1.0).unwrap();
        let _ = diagnose_csv_rows(&trace, &c.graph, 1.0);
        assert_eq!(trace, before);
    }
}
