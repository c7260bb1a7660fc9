use super::CodeSpec;
use crate::error::{check_len, Result};

/// In-place `x = u · F₂^⊗n` by butterflies; its own inverse.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(2 * half) {
            for i in block..block + half {
                bits[i] ^= bits[i + half];
            }
        }
        half *= 2;
    }
}

/// Non-systematic encoding: data on the information set, zeros elsewhere.
pub fn encode(data: &[u8], spec: &CodeSpec) -> Result<Vec<u8>> {
    check_len(spec.k(), data.len())?;
    let mut u = vec![0u8; spec.n()];
    for (&pos, &b) in spec.info_set().iter().zip(data) {
        u[pos] = b & 1;
    }
    polar_transform(&mut u);
    Ok(u)
}

/// Systematic encoding: the codeword carries `data` on the information set.
///
/// With `u` zero on the frozen set, `x_a = ⊕ { u_i : i ∈ A, i ⊇ a }` for every
/// `a ∈ A` (bitmask inclusion), so `u_A` follows by substitution from the
/// largest information index down.
pub fn encode_systematic(data: &[u8], spec: &CodeSpec) -> Result<Vec<u8>> {
    check_len(spec.k(), data.len())?;
    let info = spec.info_set();
    let mut u = vec![0u8; spec.n()];
    for idx in (0..info.len()).rev() {
        let a = info[idx];
        let mut bit = data[idx] & 1;
        for &i in &info[idx + 1..] {
            if i & a == a {
                bit ^= u[i];
            }
        }
        u[a] = bit;
    }
    polar_transform(&mut u);
    Ok(u)
}

/// Recovers the K data bits carried by a (possibly invalid) codeword estimate.
pub fn extract_data(codeword: &[u8], spec: &CodeSpec, systematic: bool) -> Result<Vec<u8>> {
    check_len(spec.n(), codeword.len())?;
    if systematic {
        return Ok(spec.info_set().iter().map(|&i| codeword[i]).collect());
    }
    let mut u = codeword.to_vec();
    polar_transform(&mut u);
    Ok(spec.info_set().iter().map(|&i| u[i]).collect())
}
