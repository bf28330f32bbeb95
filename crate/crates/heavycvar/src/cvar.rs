//! VaR and CVaR point estimation.
//!
//! The headline estimator splits the data into two independent halves: an
//! ancillary half fixes the tail threshold through an order statistic, the
//! other half is thresholded and handed to a pluggable robust mean
//! sub-routine. Scaling the robust tail mean by 1/alpha gives the CVaR
//! estimate. Empirical and random-truncation baselines are included for
//! benchmarking.
//!
//! The deviation guarantees behind the split estimator depend on local
//! growth and Lipschitz constants of the loss CDF around the quantile and on
//! a truncated second moment. None of these are observable from data, so
//! they appear only in the benchmark analysis (rate checks over sample
//! size), never as runtime inputs.

use crate::error::{Error, Result};
use crate::math;
use crate::robust_mean::{self, RMeanSpec};
use crate::sample::Sample;

/// Tail mass parameter alpha in (0, 1); CVaR averages over the worst
/// alpha-fraction of the loss distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskLevel(f64);

impl RiskLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha > 0.0 && alpha < 1.0 {
            Ok(RiskLevel(alpha))
        } else {
            Err(Error::parameter(format!(
                "risk level alpha must lie in (0,1), got {alpha}"
            )))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.0
    }

    /// Learning-mode constructor: the excess-risk guarantees additionally
    /// require alpha < 1/2.
    pub fn for_learning(alpha: f64) -> Result<Self> {
        let level = Self::new(alpha)?;
        if alpha < 0.5 {
            Ok(level)
        } else {
            Err(Error::parameter(format!(
                "learning requires alpha < 1/2, got {alpha}"
            )))
        }
    }
}

/// Output of the split-sample robust CVaR estimator.
#[derive(Debug, Clone, PartialEq)]
pub struct CvarEstimate {
    /// Tail threshold; an element of the ancillary sample.
    pub vhat: f64,
    /// Robust mean of the thresholded sample (the scaled estimate).
    pub chat_prime: f64,
    /// Final CVaR estimate, chat_prime / alpha exactly.
    pub chat: f64,
    /// Robust mean sub-routine that produced chat_prime.
    pub method: RMeanSpec,
    pub n_x: usize,
    pub n_y: usize,
}

/// VaR estimate from a sample: sort ascending and take the order statistic
/// at 1-based index max(1, floor((1-alpha)*n)).
pub fn var_order_stat(y_sample: &Sample, alpha: RiskLevel) -> Result<f64> {
    let sorted = y_sample.sorted();
    let n = sorted.len();
    let idx = math::floor_stable((1.0 - alpha.alpha()) * n as f64) as usize;
    Ok(sorted[idx.clamp(1, n) - 1])
}

/// Split-sample robust CVaR estimator.
///
/// The threshold comes from the ancillary sample's order statistic; the main
/// sample is masked to `x * 1{x >= vhat}` (ties at the threshold included)
/// and passed to the robust mean sub-routine. Both samples must be
/// non-negative losses.
pub fn cvar_robust(
    x_sample: &Sample,
    y_sample: &Sample,
    alpha: RiskLevel,
    rmean: &RMeanSpec,
) -> Result<CvarEstimate> {
    require_non_negative(x_sample)?;
    require_non_negative(y_sample)?;
    let vhat = var_order_stat(y_sample, alpha)?;
    let masked: Vec<f64> = x_sample
        .values()
        .iter()
        .map(|&x| if x >= vhat { x } else { 0.0 })
        .collect();
    let chat_prime = robust_mean::estimate(&Sample::new(masked)?, rmean)?;
    Ok(CvarEstimate {
        vhat,
        chat_prime,
        chat: chat_prime / alpha.alpha(),
        method: rmean.clone(),
        n_x: x_sample.len(),
        n_y: y_sample.len(),
    })
}

/// Single-sample empirical CVaR: threshold and tail sum both from the same
/// sample; returns sum(x * 1{x >= vhat}) / (n * alpha).
pub fn cvar_empirical(x_sample: &Sample, alpha: RiskLevel) -> Result<f64> {
    let vhat = var_order_stat(x_sample, alpha)?;
    let n = x_sample.len() as f64;
    let tail: f64 = x_sample.values().iter().filter(|&&x| x >= vhat).sum();
    Ok(tail / (n * alpha.alpha()))
}

/// Random-truncation baseline.
///
/// The index-dependent ceiling is B_i = sqrt(u * i / log(1/delta)) with u the
/// mean of squares of the main sample and i the 1-based position in the
/// sample's given order (the estimator is order-sensitive by construction).
/// Returns sum over x_i in [vhat, B_i] divided by n * alpha.
pub fn cvar_r_trunc(
    x_sample: &Sample,
    y_sample: &Sample,
    alpha: RiskLevel,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::parameter(format!(
            "confidence delta must lie in (0,1), got {delta}"
        )));
    }
    require_non_negative(x_sample)?;
    require_non_negative(y_sample)?;
    let vhat = var_order_stat(y_sample, alpha)?;
    let values = x_sample.values();
    let n = values.len() as f64;
    let u = values.iter().map(|&x| x * x).sum::<f64>() / n;
    let log_inv_delta = (1.0 / delta).ln();
    let mut acc = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let ceiling = (u * (i + 1) as f64 / log_inv_delta).sqrt();
        if x >= vhat && x <= ceiling {
            acc += x;
        }
    }
    Ok(acc / (n * alpha.alpha()))
}

fn require_non_negative(sample: &Sample) -> Result<()> {
    if sample.is_non_negative() {
        Ok(())
    } else {
        Err(Error::domain(
            "loss samples must be non-negative".to_string(),
        ))
    }
}
