//! Polar code identity, construction and encoding.

mod construct;
mod encode;
mod matrix;

use std::fmt;
use std::str::FromStr;

pub use construct::{bhattacharyya_log, construct_frozen_set};
pub use encode::{encode, encode_systematic, extract_data, polar_transform};
pub use matrix::{generator_matrix, BinaryMatrix, MAX_LOG2_N};

use crate::error::{Error, Result};

/// A polar code PC(N, K, A^c) in natural (non bit-reversed) index order.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    log2_n: u32,
    info_set: Vec<usize>,
    frozen_set: Vec<usize>,
    is_frozen: Vec<bool>,
    design_snr_db: f64,
}

impl CodeSpec {
    /// Builds a code from its frozen index set.
    pub fn from_frozen(block_len: usize, frozen: &[usize], design_snr_db: f64) -> Result<Self> {
        if block_len == 0 || !block_len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(block_len));
        }
        let log2_n = block_len.trailing_zeros();
        if log2_n > MAX_LOG2_N {
            return Err(Error::Size(log2_n));
        }
        let mut is_frozen = vec![false; block_len];
        for &f in frozen {
            if f >= block_len || is_frozen[f] {
                return Err(Error::Parameter(format!(
                    "frozen index {f} is out of range or repeated"
                )));
            }
            is_frozen[f] = true;
        }
        if frozen.len() == block_len {
            return Err(Error::InvalidDimension { n: block_len, k: 0 });
        }
        let info_set = (0..block_len).filter(|&i| !is_frozen[i]).collect();
        let frozen_set = (0..block_len).filter(|&i| is_frozen[i]).collect();
        Ok(Self {
            log2_n,
            info_set,
            frozen_set,
            is_frozen,
            design_snr_db,
        })
    }

    pub fn log2_n(&self) -> u32 {
        self.log2_n
    }

    /// Block length N.
    pub fn n(&self) -> usize {
        1 << self.log2_n
    }

    /// Number of information bits K.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen_set
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.is_frozen[i]
    }

    pub fn frozen_mask(&self) -> &[bool] {
        &self.is_frozen
    }

    pub fn design_snr_db(&self) -> f64 {
        self.design_snr_db
    }
}

/// `N=<int> K=<int> designSNR=<real> frozen=<comma-separated indices>`
impl fmt::Display for CodeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let frozen: Vec<String> = self.frozen_set.iter().map(usize::to_string).collect();
        write!(
            f,
            "N={} K={} designSNR={} frozen={}",
            self.n(),
            self.k(),
            self.design_snr_db,
            frozen.join(",")
        )
    }
}

impl FromStr for CodeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut k = None;
        let mut snr = None;
        let mut frozen = None;
        for token in s.split_whitespace() {
            let (key, value) = token.split_once('=').ok_or_else(|| parse_err(token))?;
            match key {
                "N" => n = Some(value.parse::<usize>().map_err(|_| parse_err(token))?),
                "K" => k = Some(value.parse::<usize>().map_err(|_| parse_err(token))?),
                "designSNR" => snr = Some(value.parse::<f64>().map_err(|_| parse_err(token))?),
                "frozen" => {
                    let list = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|v| v.parse::<usize>().map_err(|_| parse_err(token)))
                            .collect::<Result<Vec<_>>>()?
                    };
                    frozen = Some(list);
                }
                _ => return Err(parse_err(token)),
            }
        }
        let missing = |name: &str| Error::Parse {
            line: 1,
            msg: format!("missing field {name}"),
        };
        let n = n.ok_or_else(|| missing("N"))?;
        let k = k.ok_or_else(|| missing("K"))?;
        let snr = snr.ok_or_else(|| missing("designSNR"))?;
        let frozen = frozen.ok_or_else(|| missing("frozen"))?;
        let spec = CodeSpec::from_frozen(n, &frozen, snr)?;
        if spec.k() != k {
            return Err(Error::Parse {
                line: 1,
                msg: format!("K={k} disagrees with {} frozen indices for N={n}", frozen.len()),
            });
        }
        Ok(spec)
    }
}

fn parse_err(token: &str) -> Error {
    Error::Parse {
        line: 1,
        msg: format!("malformed field `{token}`"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_format_round_trip() {
        let spec = CodeSpec::from_frozen(8, &[0, 1, 2, 4], 0.0).unwrap();
        let text = spec.to_string();
        assert_eq!(text, "N=8 K=4 designSNR=0 frozen=0,1,2,4");
        assert_eq!(text.parse::<CodeSpec>().unwrap(), spec);

        let full = CodeSpec::from_frozen(8, &[], 1.0).unwrap();
        assert_eq!(full.to_string(), "N=8 K=8 designSNR=1 frozen=");
        assert_eq!(full.to_string().parse::<CodeSpec>().unwrap(), full);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CodeSpec::from_frozen(12, &[0], 1.0).is_err());
        assert!(CodeSpec::from_frozen(4, &[0, 0], 1.0).is_err());
        assert!(CodeSpec::from_frozen(4, &[4], 1.0).is_err());
        assert!(CodeSpec::from_frozen(2, &[0, 1], 1.0).is_err());
        assert!("N=8 K=5 designSNR=0 frozen=0,1,2,4".parse::<CodeSpec>().is_err());
        assert!("N=8 K=4 frozen=0,1,2,4".parse::<CodeSpec>().is_err());
        assert!("N=8 K=4 designSNR=x frozen=0,1,2,4".parse::<CodeSpec>().is_err());
    }

    #[test]
    fn sets_partition_indices() {
        let spec = construct_frozen_set(64, 20, 1.0).unwrap();
        let mut all: Vec<usize> = spec.info_set().iter().chain(spec.frozen_set()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..64).collect::<Vec<_>>());
        assert_eq!(spec.k(), 20);
        assert!((spec.rate() - 20.0 / 64.0).abs() < 1e-15);
    }
}
