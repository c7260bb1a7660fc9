//! Parity-check matrix derived from the polar transform, and its Tanner graph.
//!
//! Since `F₂^⊗n` is an involution, `u = x · G` for every codeword `x`. Each
//! frozen constraint `u_f = 0` is therefore a parity check on `x` whose
//! support is column `f` of `G`, i.e. all `v` with `v & f == f`.

use std::fmt::Write as _;

use crate::error::{check_len, Error, Result};
use crate::polar::CodeSpec;

/// Sparse parity-check matrix stored as sorted column lists per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    num_vars: usize,
    rows: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    pub fn new(num_vars: usize, mut rows: Vec<Vec<usize>>) -> Result<Self> {
        for row in &mut rows {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter("duplicate column in parity-check row".into()));
            }
            if row.last().is_some_and(|&c| c >= num_vars) {
                return Err(Error::Parameter(format!(
                    "column index out of range for {num_vars} variables"
                )));
            }
        }
        Ok(Self { num_vars, rows })
    }

    pub fn num_checks(&self) -> usize {
        self.rows.len()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Exports the matrix in alist format.
    pub fn to_alist(&self) -> String {
        let mut col_lists = vec![Vec::new(); self.num_vars];
        for (r, row) in self.rows.iter().enumerate() {
            for &c in row {
                col_lists[c].push(r);
            }
        }
        let max_col = col_lists.iter().map(Vec::len).max().unwrap_or(0);
        let max_row = self.rows.iter().map(Vec::len).max().unwrap_or(0);
        let join = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
        };
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.num_vars, self.rows.len());
        let _ = writeln!(out, "{max_col} {max_row}");
        let _ = writeln!(out, "{}", join(&mut col_lists.iter().map(Vec::len)));
        let _ = writeln!(out, "{}", join(&mut self.rows.iter().map(Vec::len)));
        for col in &col_lists {
            let _ = writeln!(out, "{}", join(&mut col.iter().map(|r| r + 1)));
        }
        for row in &self.rows {
            let _ = writeln!(out, "{}", join(&mut row.iter().map(|c| c + 1)));
        }
        out
    }

    /// Parses alist text. Column lists are cross-checked against row lists;
    /// zero padding entries are ignored.
    pub fn from_alist(text: &str) -> Result<Self> {
        let lines: Vec<(usize, Vec<usize>)> = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<usize>().map_err(|_| Error::Parse {
                            line: i + 1,
                            msg: format!("expected an integer, found `{t}`"),
                        })
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(|v| (i + 1, v))
            })
            .collect::<Result<_>>()?;
        let bad = |line: usize, msg: &str| Error::Parse {
            line,
            msg: msg.to_string(),
        };
        let header = lines.first().ok_or_else(|| bad(1, "empty alist"))?;
        let [num_vars, num_checks] = header.1[..] else {
            return Err(bad(header.0, "expected `<cols> <rows>`"));
        };
        let expected_lines = 4 + num_vars + num_checks;
        if lines.len() < expected_lines {
            let line = lines.last().map_or(1, |l| l.0);
            return Err(bad(line, "alist ended early"));
        }
        let strip = |v: &[usize]| v.iter().filter(|&&x| x != 0).map(|x| x - 1).collect();
        let cols: Vec<Vec<usize>> = (0..num_vars).map(|j| strip(&lines[4 + j].1)).collect();
        let rows: Vec<Vec<usize>> = (0..num_checks)
            .map(|r| strip(&lines[4 + num_vars + r].1))
            .collect();
        for (j, col) in cols.iter().enumerate() {
            for &r in col {
                if r >= num_checks || !rows[r].contains(&j) {
                    return Err(bad(lines[4 + j].0, "column list disagrees with row lists"));
                }
            }
        }
        Self::new(num_vars, rows).map_err(|e| bad(lines[4 + num_vars].0, &e.to_string()))
    }
}

/// Row `t` is column `frozen[t]` of `G_N`. Rate-one codes give zero rows.
pub fn derive_parity_check(spec: &CodeSpec) -> ParityCheckMatrix {
    let n = spec.n();
    let rows = spec
        .frozen_set()
        .iter()
        .map(|&f| (0..n).filter(|&v| v & f == f).collect())
        .collect();
    ParityCheckMatrix { num_vars: n, rows }
}

/// `true` iff every check has even parity over `bits`.
pub fn syndrome(h: &ParityCheckMatrix, bits: &[u8]) -> Result<bool> {
    check_len(h.num_vars, bits.len())?;
    Ok(syndrome_unchecked(h, bits))
}

pub(crate) fn syndrome_unchecked(h: &ParityCheckMatrix, bits: &[u8]) -> bool {
    h.rows
        .iter()
        .all(|row| row.iter().fold(0u8, |acc, &v| acc ^ bits[v]) & 1 == 0)
}

/// Bipartite check/variable graph with stable row-major edge indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TannerGraph {
    edge_check: Vec<usize>,
    edge_var: Vec<usize>,
    check_start: Vec<usize>,
    var_edges: Vec<Vec<usize>>,
}

impl TannerGraph {
    pub fn num_checks(&self) -> usize {
        self.check_start.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.var_edges.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_var.len()
    }

    /// Edge indices of check `c`; contiguous because of row-major ordering.
    pub fn check_edges(&self, c: usize) -> std::ops::Range<usize> {
        self.check_start[c]..self.check_start[c + 1]
    }

    pub fn var_edges(&self, v: usize) -> &[usize] {
        &self.var_edges[v]
    }

    pub fn edge_check(&self, e: usize) -> usize {
        self.edge_check[e]
    }

    pub fn edge_var(&self, e: usize) -> usize {
        self.edge_var[e]
    }

    pub fn check_degree(&self, c: usize) -> usize {
        self.check_start[c + 1] - self.check_start[c]
    }

    pub fn var_degree(&self, v: usize) -> usize {
        self.var_edges[v].len()
    }
}

pub fn build_tanner(h: &ParityCheckMatrix) -> TannerGraph {
    let mut edge_check = Vec::with_capacity(h.num_edges());
    let mut edge_var = Vec::with_capacity(h.num_edges());
    let mut check_start = Vec::with_capacity(h.num_checks() + 1);
    let mut var_edges = vec![Vec::new(); h.num_vars];
    check_start.push(0);
    for (c, row) in h.rows.iter().enumerate() {
        for &v in row {
            var_edges[v].push(edge_var.len());
            edge_check.push(c);
            edge_var.push(v);
        }
        check_start.push(edge_var.len());
    }
    TannerGraph {
        edge_check,
        edge_var,
        check_start,
        var_edges,
    }
}

/// Degree statistics printed by the CLI.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphStats {
    pub checks: usize,
    pub vars: usize,
    pub edges: usize,
    pub mean_row_weight: f64,
    pub max_row_weight: usize,
    pub mean_col_weight: f64,
}

impl GraphStats {
    pub fn of(graph: &TannerGraph) -> Self {
        let checks = graph.num_checks();
        let vars = graph.num_vars();
        let edges = graph.num_edges();
        Self {
            checks,
            vars,
            edges,
            mean_row_weight: if checks == 0 { 0.0 } else { edges as f64 / checks as f64 },
            max_row_weight: (0..checks).map(|c| graph.check_degree(c)).max().unwrap_or(0),
            mean_col_weight: if vars == 0 { 0.0 } else { edges as f64 / vars as f64 },
        }
    }
}
