//! Node-wise residual BP.
//!
//! Check nodes are committed one at a time, always the one whose pending
//! outgoing messages differ most from the committed ones (residual
//! `max |Λ_new − Λ_old|`). Variable-to-check messages use the channel prior,
//! `y_v + Σ_{c′≠c} Λ_{c′→v}`. One iteration-equivalent is C commits.
//! Decoding stops as soon as the hard decision satisfies every check, when
//! the budget of `t_max · C` commits is spent, or when every residual is zero.
//! A stalled decode reports `t_max` iterations.

use super::spa::{check_output, extrinsic_products};
use super::{saturate, DecodeOutcome, DecoderConfig, EdgeState, TraceStep, TANH_ARG_MAX};
use crate::error::{check_len, Result};
use crate::graph::{ParityCheckMatrix, TannerGraph};

struct Scheduler<'a> {
    graph: &'a TannerGraph,
    llr_max: f64,
    /// channel LLR plus all committed Λ, per variable
    totals: Vec<f64>,
    committed: Vec<f64>,
    pending: Vec<f64>,
    residual: Vec<f64>,
    hard: Vec<u8>,
    parity: Vec<u8>,
    unsatisfied: usize,
    scratch: Vec<f64>,
    prefixes: Vec<f64>,
}

impl<'a> Scheduler<'a> {
    fn new(graph: &'a TannerGraph, y: &[f64], llr_max: f64) -> Self {
        let totals: Vec<f64> = y.iter().map(|&v| saturate(v, llr_max)).collect();
        let hard: Vec<u8> = y.iter().map(|&v| u8::from(v <= 0.0)).collect();
        let parity: Vec<u8> = (0..graph.num_checks())
            .map(|c| graph.check_edges(c).fold(0, |p, e| p ^ hard[graph.edge_var(e)]))
            .collect();
        let unsatisfied = parity.iter().filter(|&&p| p == 1).count();
        let mut s = Self {
            graph,
            llr_max,
            totals,
            committed: vec![0.0; graph.num_edges()],
            pending: vec![0.0; graph.num_edges()],
            residual: vec![0.0; graph.num_checks()],
            hard,
            parity,
            unsatisfied,
            scratch: Vec::new(),
            prefixes: Vec::new(),
        };
        for c in 0..graph.num_checks() {
            s.refresh_check(c);
        }
        s
    }

    fn message_to_check(&self, e: usize) -> f64 {
        saturate(self.totals[self.graph.edge_var(e)] - self.committed[e], self.llr_max)
    }

    fn refresh_check(&mut self, c: usize) {
        let edges = self.graph.check_edges(c);
        let mut products = std::mem::take(&mut self.scratch);
        products.clear();
        products.extend(
            edges
                .clone()
                .map(|e| (self.message_to_check(e).clamp(-TANH_ARG_MAX, TANH_ARG_MAX) / 2.0).tanh()),
        );
        extrinsic_products(&mut products, &mut self.prefixes);
        let mut residual: f64 = 0.0;
        for (e, &p) in edges.zip(products.iter()) {
            let out = check_output(p, self.llr_max);
            residual = residual.max((out - self.committed[e]).abs());
            self.pending[e] = out;
        }
        self.residual[c] = residual;
        self.scratch = products;
    }

    fn argmax_residual(&self) -> Option<usize> {
        let mut best = None;
        let mut best_r = 0.0;
        for (c, &r) in self.residual.iter().enumerate() {
            if r > best_r {
                best_r = r;
                best = Some(c);
            }
        }
        best
    }

    fn commit(&mut self, c: usize, dirty: &mut Vec<usize>, is_dirty: &mut [bool]) {
        for e in self.graph.check_edges(c) {
            let v = self.graph.edge_var(e);
            let change = self.pending[e] - self.committed[e];
            self.committed[e] = self.pending[e];
            self.totals[v] += change;
            let bit = u8::from(self.totals[v] <= 0.0);
            if bit != self.hard[v] {
                self.hard[v] = bit;
                for &ve in self.graph.var_edges(v) {
                    let vc = self.graph.edge_check(ve);
                    self.parity[vc] ^= 1;
                    if self.parity[vc] == 1 {
                        self.unsatisfied += 1;
                    } else {
                        self.unsatisfied -= 1;
                    }
                }
            }
            for &ve in self.graph.var_edges(v) {
                let vc = self.graph.edge_check(ve);
                if vc != c && !is_dirty[vc] {
                    is_dirty[vc] = true;
                    dirty.push(vc);
                }
            }
        }
        self.residual[c] = 0.0;
        for &d in dirty.iter() {
            is_dirty[d] = false;
            self.refresh_check(d);
        }
        dirty.clear();
    }

    fn snapshot(&self, y: &[f64]) -> EdgeState {
        let edges = self.graph.num_edges();
        EdgeState {
            to_check: (0..edges).map(|e| self.message_to_check(e)).collect(),
            to_var: self.committed.clone(),
            prior: (0..edges)
                .map(|e| saturate(y[self.graph.edge_var(e)], self.llr_max))
                .collect(),
            rho: vec![1.0; edges],
            delta: vec![1; edges],
            llr_max: self.llr_max,
        }
    }
}

/// Residual-scheduled decoding with a budget of `config.t_max` iteration-equivalents.
pub fn nwrbp_decode(
    graph: &TannerGraph,
    h: &ParityCheckMatrix,
    y: &[f64],
    config: &DecoderConfig,
) -> Result<DecodeOutcome> {
    config.validate()?;
    check_len(graph.num_vars(), y.len())?;
    check_len(h.num_vars(), graph.num_vars())?;
    let checks = graph.num_checks();
    let mut sched = Scheduler::new(graph, y, config.llr_max);
    let mut trace = config.trace.then(Vec::new);
    let budget = config.t_max * checks;
    let mut commits = 0;
    let mut dirty = Vec::new();
    let mut is_dirty = vec![false; checks];
    let mut stalled = false;
    while sched.unsatisfied > 0 && commits < budget {
        let Some(c) = sched.argmax_residual() else {
            stalled = true;
            break;
        };
        sched.commit(c, &mut dirty, &mut is_dirty);
        commits += 1;
        if let Some(trace) = trace.as_mut() {
            if commits % checks == 0 || sched.unsatisfied == 0 {
                trace.push(TraceStep {
                    iteration: commits.div_ceil(checks),
                    hard_bits: sched.hard.clone(),
                    syndrome_ok: sched.unsatisfied == 0,
                    state: sched.snapshot(y),
                });
            }
        }
    }
    let converged = sched.unsatisfied == 0;
    debug_assert!(converged || stalled || commits == budget);
    let iterations = if converged {
        commits.div_ceil(checks.max(1)).max(1)
    } else {
        config.t_max
    };
    Ok(DecodeOutcome {
        hard_bits: sched.hard,
        iterations,
        converged,
        trace,
    })
}
