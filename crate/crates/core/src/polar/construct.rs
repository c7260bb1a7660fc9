use super::CodeSpec;
use crate::error::{Error, Result};

/// Log-domain Bhattacharyya parameters `ln Z_i` of the N synthetic channels.
///
/// The base channel is BPSK/AWGN at `design_snr_db`, `Z₀ = exp(−10^(snr/10))`.
/// The most significant index bit selects the first split, so index `i` is
/// reached by applying `Z⁻ = 2Z − Z²` for a 0 bit and `Z⁺ = Z²` for a 1 bit,
/// from the MSB down to the LSB.
pub fn bhattacharyya_log(log2_n: u32, design_snr_db: f64) -> Vec<f64> {
    let mut z = vec![-(10f64.powf(design_snr_db / 10.0))];
    for _ in 0..log2_n {
        let mut next = Vec::with_capacity(z.len() * 2);
        for &lz in &z {
            // ln(2Z − Z²) = ln Z + ln(2 − Z)
            next.push(lz + std::f64::consts::LN_2 + (-(lz.exp()) / 2.0).ln_1p());
            next.push(2.0 * lz);
        }
        z = next;
    }
    z
}

/// Freezes the N − K channels with the largest Bhattacharyya parameter.
/// Equal parameters freeze the smaller index first.
pub fn construct_frozen_set(block_len: usize, k: usize, design_snr_db: f64) -> Result<CodeSpec> {
    if block_len == 0 || !block_len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(block_len));
    }
    if k == 0 || k > block_len {
        return Err(Error::InvalidDimension { n: block_len, k });
    }
    if !design_snr_db.is_finite() {
        return Err(Error::Parameter("design SNR must be finite".into()));
    }
    let log2_n = block_len.trailing_zeros();
    if log2_n > super::MAX_LOG2_N {
        return Err(Error::Size(log2_n));
    }
    let z = bhattacharyya_log(log2_n, design_snr_db);
    let frozen = least_reliable(&z, block_len - k);
    CodeSpec::from_frozen(block_len, &frozen, design_snr_db)
}

/// Indices of the `count` largest parameters, ascending; ties go to the smaller index.
fn least_reliable(z: &[f64], count: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut frozen = order[..count].to_vec();
    frozen.sort_unstable();
    frozen
}
