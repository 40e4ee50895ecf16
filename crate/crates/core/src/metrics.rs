//! Effective rate with training prelog, and averaging over blocks.

use crate::alignment::SchemeOutcome;
use crate::{Error, Result};

/// Transmit power, noise power (both linear) and coherent block length.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkBudget {
    pub power: f64,
    pub noise: f64,
    /// Symbols per coherent block `N`.
    pub block_len: u64,
}

impl LinkBudget {
    pub fn new(power: f64, noise: f64, block_len: u64) -> Result<Self> {
        let lb = Self {
            power,
            noise,
            block_len,
        };
        lb.validate()?;
        Ok(lb)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.power.is_finite() && self.power > 0.0) {
            return Err(Error::InvalidLinkBudget("transmit power must be positive"));
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return Err(Error::InvalidLinkBudget("noise power must be positive"));
        }
        if self.block_len == 0 {
            return Err(Error::InvalidLinkBudget("block length must be at least 1"));
        }
        Ok(())
    }

    pub fn snr(&self, gain: f64) -> f64 {
        self.power * gain / self.noise
    }
}

/// `max(0, (N - n_used) / N)`.
pub fn prelog(training_symbols: u64, block_len: u64) -> f64 {
    if training_symbols >= block_len {
        return 0.0;
    }
    (block_len - training_symbols) as f64 / block_len as f64
}

/// Spectral efficiency in bps/Hz after the training prelog.
pub fn effective_rate(gain: f64, training_symbols: u64, lb: &LinkBudget) -> f64 {
    let pre = prelog(training_symbols, lb.block_len);
    if pre == 0.0 {
        return 0.0;
    }
    pre * lb.snr(gain).ln_1p() / core::f64::consts::LN_2
}

/// Compensated (Neumaier) mean.
pub fn mean<I: IntoIterator<Item = f64>>(values: I) -> Result<f64> {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut n = 0usize;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptySequence);
    }
    Ok((sum + comp) / n as f64)
}

/// Mean effective rate; each outcome stands for one coherent block.
pub fn average_rate(outcomes: &[SchemeOutcome], lb: &LinkBudget) -> Result<f64> {
    mean(
        outcomes
            .iter()
            .map(|o| effective_rate(o.gain, o.training_symbols, lb)),
    )
}
