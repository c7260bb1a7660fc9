use super::{boxplus, g_combine};
use crate::error::{check_len, Result};
use crate::polar::CodeSpec;

/// Workspace for one SC descent: LLRs and re-encoded bits per tree depth.
#[derive(Clone)]
pub(crate) struct ScWorkspace {
    pub alpha: Vec<Vec<f64>>,
    pub bits: Vec<Vec<u8>>,
}

impl ScWorkspace {
    pub fn new(log2_n: u32, y: &[f64]) -> Self {
        let n = 1usize << log2_n;
        let mut alpha: Vec<Vec<f64>> = (0..=log2_n).map(|d| vec![0.0; n >> d]).collect();
        alpha[0].copy_from_slice(y);
        let bits = (0..=log2_n).map(|d| vec![0u8; n >> d]).collect();
        Self { alpha, bits }
    }

    /// LLRs of the left child of the node at `depth`.
    pub fn descend_left(&mut self, depth: usize) {
        let (upper, lower) = self.alpha.split_at_mut(depth + 1);
        let parent = &upper[depth];
        let half = parent.len() / 2;
        for (k, out) in lower[0].iter_mut().enumerate() {
            *out = boxplus(parent[k], parent[k + half]);
        }
    }

    /// LLRs of the right child, using the left child's re-encoded bits held
    /// in the first half of `bits[depth]`.
    pub fn descend_right(&mut self, depth: usize) {
        let (upper, lower) = self.alpha.split_at_mut(depth + 1);
        let parent = &upper[depth];
        let half = parent.len() / 2;
        let left_bits = &self.bits[depth];
        for (k, out) in lower[0].iter_mut().enumerate() {
            *out = g_combine(parent[k], parent[k + half], left_bits[k]);
        }
    }

    pub fn stash_left(&mut self, depth: usize) {
        let (upper, lower) = self.bits.split_at_mut(depth + 1);
        let half = upper[depth].len() / 2;
        upper[depth][..half].copy_from_slice(&lower[0]);
    }

    /// Combines left `a` and right `b` into `(a ⊕ b, b)`.
    pub fn combine(&mut self, depth: usize) {
        let (upper, lower) = self.bits.split_at_mut(depth + 1);
        let node = &mut upper[depth];
        let half = node.len() / 2;
        let (a, b) = node.split_at_mut(half);
        for ((x, y), &r) in a.iter_mut().zip(b.iter_mut()).zip(&lower[0][..half]) {
            *x ^= r;
            *y = r;
        }
    }
}

fn sc_node(ws: &mut ScWorkspace, depth: usize, leaf: &mut usize, log2_n: usize, frozen: &[bool]) {
    if depth == log2_n {
        let llr = ws.alpha[depth][0];
        ws.bits[depth][0] = if frozen[*leaf] { 0 } else { u8::from(llr <= 0.0) };
        *leaf += 1;
        return;
    }
    ws.descend_left(depth);
    sc_node(ws, depth + 1, leaf, log2_n, frozen);
    ws.stash_left(depth);
    ws.descend_right(depth);
    sc_node(ws, depth + 1, leaf, log2_n, frozen);
    ws.combine(depth);
}

/// Successive cancellation. Returns the re-encoded codeword estimate;
/// information decisions take bit 1 on `LLR ≤ 0`.
pub fn sc_decode(spec: &CodeSpec, y: &[f64]) -> Result<Vec<u8>> {
    check_len(spec.n(), y.len())?;
    let mut ws = ScWorkspace::new(spec.log2_n(), y);
    let mut leaf = 0;
    sc_node(&mut ws, 0, &mut leaf, spec.log2_n() as usize, spec.frozen_mask());
    Ok(ws.bits.swap_remove(0))
}
