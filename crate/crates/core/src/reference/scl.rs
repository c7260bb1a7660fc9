use super::sc::ScWorkspace;
use crate::error::{check_len, Error, Result};
use crate::polar::CodeSpec;

#[derive(Clone)]
struct ScPath {
    ws: ScWorkspace,
    metric: f64,
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Penalty of deciding `bit` against an LLR: `ln(1 + exp(−(1−2·bit)·llr))`.
#[inline]
fn penalty(llr: f64, bit: u8) -> f64 {
    if bit == 0 {
        softplus(-llr)
    } else {
        softplus(llr)
    }
}

struct ListDecoder<'a> {
    frozen: &'a [bool],
    log2_n: usize,
    list_size: usize,
    leaf: usize,
    paths: Vec<ScPath>,
}

impl ListDecoder<'_> {
    fn node(&mut self, depth: usize) {
        if depth == self.log2_n {
            self.leaf_step(depth);
            return;
        }
        for p in &mut self.paths {
            p.ws.descend_left(depth);
        }
        self.node(depth + 1);
        for p in &mut self.paths {
            p.ws.stash_left(depth);
            p.ws.descend_right(depth);
        }
        self.node(depth + 1);
        for p in &mut self.paths {
            p.ws.combine(depth);
        }
    }

    fn leaf_step(&mut self, depth: usize) {
        let leaf = self.leaf;
        self.leaf += 1;
        if self.frozen[leaf] {
            for p in &mut self.paths {
                let llr = p.ws.alpha[depth][0];
                p.metric += penalty(llr, 0);
                p.ws.bits[depth][0] = 0;
            }
            return;
        }
        // Each path proposes its SC-preferred bit first so that exact metric
        // ties resolve the way successive cancellation would.
        let mut candidates: Vec<(usize, u8, f64)> = Vec::with_capacity(2 * self.paths.len());
        for (i, p) in self.paths.iter().enumerate() {
            let llr = p.ws.alpha[depth][0];
            let preferred = u8::from(llr <= 0.0);
            for bit in [preferred, preferred ^ 1] {
                candidates.push((i, bit, p.metric + penalty(llr, bit)));
            }
        }
        candidates.sort_by(|a, b| a.2.total_cmp(&b.2));
        candidates.truncate(self.list_size);

        let mut children = vec![0usize; self.paths.len()];
        for &(i, _, _) in &candidates {
            children[i] += 1;
        }
        let mut slots: Vec<Option<ScPath>> = std::mem::take(&mut self.paths).into_iter().map(Some).collect();
        let mut next = Vec::with_capacity(candidates.len());
        for (i, bit, metric) in candidates {
            children[i] -= 1;
            let mut path = if children[i] == 0 {
                slots[i].take().expect("parent consumed twice")
            } else {
                slots[i].as_ref().expect("parent consumed").clone()
            };
            path.metric = metric;
            path.ws.bits[depth][0] = bit;
            next.push(path);
        }
        self.paths = next;
    }
}

/// Successive cancellation list decoding with the exact LLR path metric.
/// Returns the codeword of the path with the smallest final metric.
pub fn scl_decode(spec: &CodeSpec, y: &[f64], list_size: usize) -> Result<Vec<u8>> {
    check_len(spec.n(), y.len())?;
    if list_size == 0 {
        return Err(Error::Parameter("list size must be at least 1".into()));
    }
    let mut dec = ListDecoder {
        frozen: spec.frozen_mask(),
        log2_n: spec.log2_n() as usize,
        list_size,
        leaf: 0,
        paths: vec![ScPath {
            ws: ScWorkspace::new(spec.log2_n(), y),
            metric: 0.0,
        }],
    };
    dec.node(0);
    let best = dec
        .paths
        .into_iter()
        .reduce(|best, p| if p.metric < best.metric { p } else { best })
        .expect("list never empties");
    let mut ws = best.ws;
    Ok(ws.bits.swap_remove(0))
}
