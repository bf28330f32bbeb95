//! Robust estimators of the mean of a real sample under potential heavy
//! tails.
//!
//! Five interchangeable estimators are provided: the plain empirical mean,
//! median-of-means over contiguous blocks, a Catoni M-estimator, a
//! quantile-truncated mean with sample splitting, and a soft-truncation
//! estimator. All of them only require a finite second moment to deviate by
//! at most c * sigma * sqrt((1 + log(1/delta)) / n) with probability
//! 1 - delta, with estimator-specific constants under their idealized
//! parameter rules: c <= 2*sqrt(e) for median-of-means at k = ceil(log(1/delta))
//! blocks, c <= 2 for the Catoni estimator, c <= 9*sqrt(2) for the truncated
//! mean, and c <= sqrt(2) for soft truncation (the latter against the raw
//! second moment rather than the variance). The constants are documentation
//! only; nothing here asserts them at runtime.

use crate::error::{Error, Result};
use crate::math;
use crate::sample::Sample;

/// Default residual tolerance for the Catoni root solve: the solver stops
/// once |sum psi| <= CATONI_TOL * n.
pub const CATONI_TOL: f64 = 1e-10;

/// Iteration cap for all root solves in this module.
const MAX_ROOT_ITERS: usize = 200;

/// Saturation level of the soft-truncation influence: psi(x) = 2*sqrt(2)/3
/// for |x| >= sqrt(2).
pub const SOFT_TRUNC_PLATEAU: f64 = 0.942_809_041_582_063_4;

/// Scale parameter choice for the M-estimator style routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    /// Dispersion-based automatic scale, see [`auto_scale`].
    Auto,
    /// Explicit positive scale.
    Fixed(f64),
}

/// Tagged choice of robust mean sub-routine plus its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum RMeanSpec {
    /// Arithmetic mean, no robustness.
    Empirical,
    /// Median of contiguous block means.
    MedianOfMeans { blocks: usize },
    /// Catoni M-estimator with the log-type influence function.
    Catoni { scale: Scale, delta: f64 },
    /// Truncated mean with quantile cutoffs learned on a held-out half.
    TruncatedMean { delta: f64 },
    /// Soft truncation: bounded odd transform applied per observation.
    SoftTruncated { scale: Scale, delta: f64 },
}

impl RMeanSpec {
    pub fn mom(blocks: usize) -> Self {
        RMeanSpec::MedianOfMeans { blocks }
    }

    pub fn catoni_auto(delta: f64) -> Self {
        RMeanSpec::Catoni {
            scale: Scale::Auto,
            delta,
        }
    }

    pub fn soft_truncated_auto(delta: f64) -> Self {
        RMeanSpec::SoftTruncated {
            scale: Scale::Auto,
            delta,
        }
    }

    /// Short identifier used in CSV output and CLI flags.
    pub fn id(&self) -> &'static str {
        match self {
            RMeanSpec::Empirical => "empirical",
            RMeanSpec::MedianOfMeans { .. } => "mom",
            RMeanSpec::Catoni { .. } => "catoni",
            RMeanSpec::TruncatedMean { .. } => "lm",
            RMeanSpec::SoftTruncated { .. } => "hol",
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            RMeanSpec::Empirical => Ok(()),
            RMeanSpec::MedianOfMeans { blocks } => {
                if *blocks < 1 || *blocks > n {
                    Err(Error::parameter(format!(
                        "median-of-means needs 1 <= k <= n, got k={blocks} with n={n}"
                    )))
                } else {
                    Ok(())
                }
            }
            RMeanSpec::Catoni { scale, delta } | RMeanSpec::SoftTruncated { scale, delta } => {
                if let Scale::Fixed(s) = scale {
                    if !(*s > 0.0) {
                        return Err(Error::parameter(format!("scale must be positive, got {s}")));
                    }
                }
                check_delta(*delta)
            }
            RMeanSpec::TruncatedMean { delta } => check_delta(*delta),
        }
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::parameter(format!(
            "confidence delta must lie in (0,1), got {delta}"
        )))
    }
}

/// Block count k = ceil(log(1/delta)) giving sub-Gaussian deviations for
/// median-of-means at confidence delta.
pub fn mom_blocks(delta: f64) -> usize {
    ((1.0 / delta).ln().ceil() as usize).max(1)
}

/// Block count k = 1 + ceil(3.5 * log(1/delta)); the more aggressive rule
/// used by the benchmark baselines.
pub fn mom_blocks_conservative(delta: f64) -> usize {
    1 + (3.5 * (1.0 / delta).ln()).ceil() as usize
}

/// Evaluate a robust mean spec on a sample.
pub fn estimate(sample: &Sample, spec: &RMeanSpec) -> Result<f64> {
    spec.validate(sample.len())?;
    match spec {
        RMeanSpec::Empirical => mean_empirical(sample),
        RMeanSpec::MedianOfMeans { blocks } => mean_mom(sample, *blocks),
        RMeanSpec::Catoni { scale, delta } => {
            let s = resolve_scale(sample, scale, *delta)?;
            mean_catoni(sample, s, CATONI_TOL)
        }
        RMeanSpec::TruncatedMean { delta } => mean_lm(sample, *delta),
        RMeanSpec::SoftTruncated { scale, delta } => {
            let s = resolve_scale(sample, scale, *delta)?;
            mean_hol(sample, s)
        }
    }
}

fn resolve_scale(sample: &Sample, scale: &Scale, delta: f64) -> Result<f64> {
    match scale {
        Scale::Fixed(s) => Ok(*s),
        Scale::Auto => Ok(auto_scale(sample, delta)?.scale),
    }
}

/// Arithmetic mean.
pub fn mean_empirical(sample: &Sample) -> Result<f64> {
    Ok(math::mean(sample.values()))
}

/// Median of means over k contiguous in-order blocks.
///
/// Blocks have size floor(n/k); the last block absorbs the remainder. For an
/// even number of blocks the median is the midpoint of the two central block
/// means. The estimator is permutation-sensitive by construction.
pub fn mean_mom(sample: &Sample, k: usize) -> Result<f64> {
    let n = sample.len();
    if k < 1 || k > n {
        return Err(Error::parameter(format!(
            "median-of-means needs 1 <= k <= n, got k={k} with n={n}"
        )));
    }
    let base = n / k;
    let values = sample.values();
    let mut block_means = Vec::with_capacity(k);
    for j in 0..k {
        let start = j * base;
        let end = if j + 1 == k { n } else { start + base };
        block_means.push(math::mean(&values[start..end]));
    }
    Ok(math::median(&block_means))
}

/// Narrowest Catoni influence function: sign(x) * log(1 + |x| + x^2/2).
pub fn psi_catoni(x: f64) -> f64 {
    let a = x.abs();
    let y = (1.0 + a + 0.5 * a * a).ln();
    if x < 0.0 {
        -y
    } else {
        y
    }
}

fn psi_catoni_deriv(x: f64) -> f64 {
    let a = x.abs();
    (1.0 + a) / (1.0 + a + 0.5 * a * a)
}

/// Catoni M-estimate of the mean: the root v of sum_i psi((u_i - v)/s) = 0.
///
/// The influence sum is strictly decreasing in v and the root lies in
/// [min, max] of the sample, so a Newton iteration safeguarded by bisection
/// on that bracket always converges. Stops once |sum psi| <= tol * n.
pub fn mean_catoni(sample: &Sample, scale: f64, tol: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::parameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::parameter(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let values = sample.values();
    let n = values.len() as f64;
    let target = tol * n;

    let g = |v: f64| -> f64 { values.iter().map(|&u| psi_catoni((u - v) / scale)).sum() };
    let g_deriv = |v: f64| -> f64 {
        -values
            .iter()
            .map(|&u| psi_catoni_deriv((u - v) / scale))
            .sum::<f64>()
            / scale
    };

    let mut lo = sample.min();
    let mut hi = sample.max();
    let g_lo = g(lo);
    if g_lo.abs() <= target {
        return Ok(lo);
    }
    let g_hi = g(hi);
    if g_hi.abs() <= target {
        return Ok(hi);
    }

    // Safeguarded Newton: the influence sum is strictly decreasing, so
    // g(lo) > 0 > g(hi) brackets the root. A Newton step is taken only when
    // it stays inside the bracket and shrinks at least as fast as halving
    // (measured against the step before last); otherwise bisect. This rules
    // out the period-two Newton cycles the flat log tails can produce.
    let mut v = 0.5 * (lo + hi);
    let mut dx_old = hi - lo;
    let mut residual = g(v);
    for _ in 0..MAX_ROOT_ITERS {
        if residual.abs() <= target {
            return Ok(v);
        }
        if residual > 0.0 {
            lo = v;
        } else {
            hi = v;
        }
        let slope = g_deriv(v);
        let newton_step = residual / slope;
        let newton = v - newton_step;
        let dx;
        if slope.is_finite()
            && newton > lo
            && newton < hi
            && (2.0 * residual).abs() <= (dx_old * slope).abs()
        {
            dx = newton_step.abs();
            v = newton;
        } else {
            dx = 0.5 * (hi - lo);
            v = lo + dx;
        }
        dx_old = dx;
        if !(dx > 0.0) {
            break; // bracket collapsed to a point
        }
        residual = g(v);
    }
    if residual.abs() <= target {
        Ok(v)
    } else {
        Err(Error::NoConvergence {
            residual: residual.abs(),
            iterations: MAX_ROOT_ITERS,
        })
    }
}

/// Truncated mean of Eq-style form with explicit cutoffs: observations
/// outside [a, b] contribute zero, the denominator stays n.
pub fn mean_truncated(sample: &Sample, a: f64, b: f64) -> Result<f64> {
    if a > b {
        return Err(Error::parameter(format!(
            "truncation interval is empty: a={a} > b={b}"
        )));
    }
    let values = sample.values();
    let kept: f64 = values.iter().filter(|&&u| u >= a && u <= b).sum();
    Ok(kept / values.len() as f64)
}

/// Quantile-truncated mean with deterministic sample splitting.
///
/// The first ceil(n/2) observations (in given order) form the estimation
/// half A, the rest form B. Cutoffs are the eps/2 and 1-eps/2 empirical
/// quantiles of B with eps = min(1/2, 8 log(8/delta) / (3 |B|)), and the
/// truncated mean is taken over A. The split follows the input order; callers
/// wanting permutation invariance should canonically sort the sample first.
pub fn mean_lm(sample: &Sample, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::parameter(format!(
            "truncated mean needs n >= 2, got n={n}"
        )));
    }
    let split = n.div_ceil(2);
    let values = sample.values();
    let half_a = Sample::from_slice(&values[..split])?;
    let half_b = &values[split..];

    let m = half_b.len() as f64;
    let eps = (8.0 * (8.0 / delta).ln() / (3.0 * m)).min(0.5);
    let mut sorted_b = half_b.to_vec();
    sorted_b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let a = quantile_sorted(&sorted_b, eps / 2.0);
    let b = quantile_sorted(&sorted_b, 1.0 - eps / 2.0);
    mean_truncated(&half_a, a, b)
}

/// Empirical q-quantile of a sorted slice: order statistic at 1-based index
/// ceil(q*m), clamped into [1, m].
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let m = sorted.len();
    let idx = (q * m as f64).ceil() as usize;
    sorted[idx.clamp(1, m) - 1]
}

/// Soft-truncation influence: x - x^3/6 inside [-sqrt(2), sqrt(2)], clamped
/// to +-2*sqrt(2)/3 outside. Odd, bounded, non-decreasing.
pub fn psi_soft(x: f64) -> f64 {
    if x.abs() <= std::f64::consts::SQRT_2 {
        x - x * x * x / 6.0
    } else if x > 0.0 {
        SOFT_TRUNC_PLATEAU
    } else {
        -SOFT_TRUNC_PLATEAU
    }
}

/// Soft truncation estimator: (s/n) * sum psi(u_i / s).
///
/// Output magnitude never exceeds s * 2*sqrt(2)/3.
pub fn mean_hol(sample: &Sample, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::parameter(format!(
            "scale must be positive, got {scale}"
        )));
    }
    let sum: f64 = sample.values().iter().map(|&u| psi_soft(u / scale)).sum();
    Ok(scale * sum / sample.len() as f64)
}

/// Automatic scale estimate together with a degeneracy flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleEstimate {
    pub scale: f64,
    /// Set when the sample had zero dispersion and the scale was floored at
    /// a machine-epsilon level.
    pub degenerate: bool,
}

/// Dispersion-based scale: s = sigma_hat * sqrt(n / (2 log(1/delta))).
///
/// sigma_hat is a Catoni-type dispersion M-estimate (see
/// [`dispersion_mest`]); when the M-estimate fails the sample standard
/// deviation is used instead. A zero-dispersion sample yields a
/// machine-epsilon-scaled floor and sets the `degenerate` flag.
pub fn auto_scale(sample: &Sample, delta: f64) -> Result<ScaleEstimate> {
    check_delta(delta)?;
    let n = sample.len();
    if n < 2 {
        return Err(Error::parameter(format!(
            "automatic scale needs n >= 2, got n={n}"
        )));
    }
    let sigma = dispersion_mest(sample, delta).unwrap_or_else(|| math::sample_std(sample.values()));
    let factor = (n as f64 / (2.0 * (1.0 / delta).ln())).sqrt();
    if sigma > 0.0 {
        Ok(ScaleEstimate {
            scale: sigma * factor,
            degenerate: false,
        })
    } else {
        let floor = f64::EPSILON * sample.max().abs().max(1.0);
        Ok(ScaleEstimate {
            scale: floor * factor,
            degenerate: true,
        })
    }
}

/// Catoni-type dispersion M-estimate: the fixed point of a Catoni mean
/// estimate of the squared deviations about the median.
///
/// Iterates sigma^2 <- CatoniMean({(u_i - med)^2}) where the inner mean
/// estimate is scaled by sqrt(2) * sigma^2 * sqrt(n / (2 log(1/delta))),
/// starting from the plain mean of squared deviations. Returns None for
/// zero-dispersion samples or when the iteration fails, in which case
/// callers fall back to the sample standard deviation.
pub fn dispersion_mest(sample: &Sample, delta: f64) -> Option<f64> {
    let center = math::median(sample.values());
    let sq_devs: Vec<f64> = sample
        .values()
        .iter()
        .map(|&u| (u - center) * (u - center))
        .collect();
    let mut var = math::mean(&sq_devs);
    if !(var > 0.0) {
        return None;
    }
    let sq_sample = Sample::new(sq_devs).ok()?;
    let factor = (sample.len() as f64 / (2.0 * (1.0 / delta).ln())).sqrt();
    for _ in 0..64 {
        let inner_scale = std::f64::consts::SQRT_2 * var * factor;
        let next = mean_catoni(&sq_sample, inner_scale, CATONI_TOL).ok()?;
        if !(next > 0.0) {
            return None;
        }
        if (next - var).abs() <= 1e-12 * var {
            return Some(next.sqrt());
        }
        var = next;
    }
    Some(var.sqrt())
}
