//! BPSK over AWGN and channel LLRs.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    /// Noise standard deviation per real dimension.
    pub sigma: f64,
}

impl ChannelParams {
    /// `σ² = 1 / (2 · R · 10^(Eb/N0 / 10))` for unit-energy BPSK symbols.
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Parameter(format!("code rate {rate} is outside (0, 1]")));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::Parameter("Eb/N0 must be finite".into()));
        }
        let sigma = (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt();
        Ok(Self { ebn0_db, rate, sigma })
    }

    /// Overrides σ, e.g. to simulate a noiseless channel with a tiny value.
    pub fn with_sigma(mut self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("sigma {sigma} must be positive")));
        }
        self.sigma = sigma;
        Ok(self)
    }
}

/// Bit 0 ↦ +1, bit 1 ↦ −1.
pub fn bpsk_modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 }).collect()
}

pub fn awgn_transmit<R: Rng + ?Sized>(symbols: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    symbols
        .iter()
        .map(|&s| {
            let n: f64 = rng.sample(StandardNormal);
            s + sigma * n
        })
        .collect()
}

/// `y = 2r / σ²`; positive values favour bit 0.
pub fn llr_compute(received: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::Parameter(format!("sigma {sigma} must be positive")));
    }
    let scale = 2.0 / (sigma * sigma);
    Ok(received.iter().map(|r| scale * r).collect())
}
