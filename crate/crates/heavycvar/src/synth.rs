//! Seeded samplers and analytic ground-truth oracles for the benchmark
//! distribution families, plus the linear-regression data generator.
//!
//! Sampling is inverse-CDF throughout, driven by the deterministic generator
//! in [`crate::rng`], so a `(spec, n, seed)` triple always reproduces the
//! same sample regardless of platform or thread count.

use crate::cvar::RiskLevel;
use crate::error::{Error, Result};
use crate::math;
use crate::objective::Datum;
use crate::rng::DetRng;
use crate::sample::Sample;

/// Distribution family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// |N(0, sigma^2)|, the zero-location fold.
    FoldedNormal { sigma: f64 },
    /// exp(mu + sigma * N(0,1)).
    LogNormal { mu: f64, sigma: f64 },
    /// Support [scale, inf), survival (scale/x)^shape.
    Pareto { shape: f64, scale: f64 },
    /// Mean `scale`.
    Exponential { scale: f64 },
    /// Uniform on [0, hi].
    Uniform { hi: f64 },
    /// N(0, sigma^2).
    Normal { sigma: f64 },
}

impl Family {
    pub fn id(&self) -> &'static str {
        match self {
            Family::FoldedNormal { .. } => "folded-normal",
            Family::LogNormal { .. } => "log-normal",
            Family::Pareto { .. } => "pareto",
            Family::Exponential { .. } => "exponential",
            Family::Uniform { .. } => "uniform",
            Family::Normal { .. } => "normal",
        }
    }
}

/// A family plus the centering flag (subtract the analytic mean; used for
/// zero-mean noise).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistSpec {
    pub family: Family,
    pub centered: bool,
}

impl DistSpec {
    fn validated(family: Family) -> Result<Self> {
        let ok = match family {
            Family::FoldedNormal { sigma } | Family::Normal { sigma } => sigma > 0.0,
            Family::LogNormal { mu, sigma } => mu.is_finite() && sigma > 0.0,
            Family::Pareto { shape, scale } => shape > 0.0 && scale > 0.0,
            Family::Exponential { scale } => scale > 0.0,
            Family::Uniform { hi } => hi > 0.0,
        };
        if ok {
            Ok(DistSpec {
                family,
                centered: false,
            })
        } else {
            Err(Error::parameter(format!(
                "distribution parameters must be positive: {family:?}"
            )))
        }
    }

    pub fn folded_normal(sigma: f64) -> Result<Self> {
        Self::validated(Family::FoldedNormal { sigma })
    }

    pub fn log_normal(mu: f64, sigma: f64) -> Result<Self> {
        Self::validated(Family::LogNormal { mu, sigma })
    }

    pub fn pareto(shape: f64, scale: f64) -> Result<Self> {
        Self::validated(Family::Pareto { shape, scale })
    }

    pub fn exponential(scale: f64) -> Result<Self> {
        Self::validated(Family::Exponential { scale })
    }

    pub fn uniform(hi: f64) -> Result<Self> {
        Self::validated(Family::Uniform { hi })
    }

    pub fn normal(sigma: f64) -> Result<Self> {
        Self::validated(Family::Normal { sigma })
    }

    /// Subtract the analytic mean from every draw.
    pub fn centered(mut self) -> Self {
        self.centered = true;
        self
    }

    /// Analytic mean of the base (uncentered) family.
    pub fn analytic_mean(&self) -> Result<f64> {
        Ok(match self.family {
            Family::FoldedNormal { sigma } => sigma * (2.0 / std::f64::consts::PI).sqrt(),
            Family::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            Family::Pareto { shape, scale } => {
                if shape <= 1.0 {
                    return Err(Error::parameter(format!(
                        "pareto mean needs shape > 1, got {shape}"
                    )));
                }
                shape * scale / (shape - 1.0)
            }
            Family::Exponential { scale } => scale,
            Family::Uniform { hi } => 0.5 * hi,
            Family::Normal { .. } => 0.0,
        })
    }

    fn draw(&self, u: f64) -> f64 {
        let base = match self.family {
            Family::FoldedNormal { sigma } => {
                (sigma * math::normal_inv_cdf(u).expect("u in (0,1)")).abs()
            }
            Family::LogNormal { mu, sigma } => {
                (mu + sigma * math::normal_inv_cdf(u).expect("u in (0,1)")).exp()
            }
            Family::Pareto { shape, scale } => scale * u.powf(-1.0 / shape),
            Family::Exponential { scale } => -scale * u.ln(),
            Family::Uniform { hi } => hi * u,
            Family::Normal { sigma } => sigma * math::normal_inv_cdf(u).expect("u in (0,1)"),
        };
        if self.centered {
            base - self.analytic_mean().expect("centering checked at build")
        } else {
            base
        }
    }

    fn check_centerable(&self) -> Result<()> {
        if self.centered {
            self.analytic_mean().map(|_| ())
        } else {
            Ok(())
        }
    }
}

/// n i.i.d. draws on sub-stream 0 of the seed.
pub fn sample(spec: &DistSpec, n: usize, seed: u64) -> Result<Sample> {
    sample_stream(spec, n, seed, 0)
}

/// n i.i.d. draws on an explicit sub-stream; parallel callers use disjoint
/// stream ids under one seed.
pub fn sample_stream(spec: &DistSpec, n: usize, seed: u64, stream: u64) -> Result<Sample> {
    if n < 1 {
        return Err(Error::parameter("sample size must be at least 1"));
    }
    spec.check_centerable()?;
    let mut rng = DetRng::new(seed, stream);
    let values: Vec<f64> = (0..n).map(|_| spec.draw(rng.uniform_open01())).collect();
    Sample::new(values)
}

/// Analytic quantile function at probability p.
pub fn quantile(spec: &DistSpec, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "quantile probability must lie in (0,1), got {p}"
        )));
    }
    let base = match spec.family {
        Family::FoldedNormal { sigma } => sigma * std::f64::consts::SQRT_2 * math::erf_inv(p)?,
        Family::LogNormal { mu, sigma } => (mu + sigma * math::normal_inv_cdf(p)?).exp(),
        Family::Pareto { shape, scale } => scale * (1.0 - p).powf(-1.0 / shape),
        Family::Exponential { scale } => -scale * (1.0 - p).ln(),
        Family::Uniform { hi } => hi * p,
        Family::Normal { sigma } => sigma * math::normal_inv_cdf(p)?,
    };
    Ok(if spec.centered {
        base - spec.analytic_mean()?
    } else {
        base
    })
}

/// Inter-quartile range q(0.75) - q(0.25).
pub fn iqr(spec: &DistSpec) -> Result<f64> {
    Ok(quantile(spec, 0.75)? - quantile(spec, 0.25)?)
}

/// Analytic (VaR, CVaR) at risk level alpha.
///
/// Closed forms for the exponential, Pareto, log-normal, normal and uniform
/// families; the folded normal tail mean comes from adaptive quadrature at
/// relative error 1e-8.
pub fn true_var_cvar(spec: &DistSpec, alpha: RiskLevel) -> Result<(f64, f64)> {
    let a = alpha.alpha();
    let (var, cvar) = match spec.family {
        Family::Exponential { scale } => {
            let var = scale * (1.0 / a).ln();
            (var, var + scale)
        }
        Family::Pareto { shape, scale } => {
            if shape <= 1.0 {
                return Err(Error::UnsupportedFamily(format!(
                    "pareto CVaR needs shape > 1, got {shape}"
                )));
            }
            let var = scale * a.powf(-1.0 / shape);
            (var, shape * var / (shape - 1.0))
        }
        Family::LogNormal { mu, sigma } => {
            let z = math::normal_inv_cdf(1.0 - a)?;
            let var = (mu + sigma * z).exp();
            let cvar = (mu + 0.5 * sigma * sigma).exp() * math::normal_cdf(sigma - z) / a;
            (var, cvar)
        }
        Family::FoldedNormal { sigma } => {
            let var = sigma * std::f64::consts::SQRT_2 * math::erf_inv(1.0 - a)?;
            let density = |x: f64| {
                let t = x / sigma;
                2.0 / sigma * math::normal_pdf(t) * x
            };
            let upper = var + 40.0 * sigma;
            let tail = math::integrate_adaptive(&density, var, upper, 1e-8);
            (var, tail / a)
        }
        Family::Normal { sigma } => {
            let z = math::normal_inv_cdf(1.0 - a)?;
            (sigma * z, sigma * math::normal_pdf(z) / a)
        }
        Family::Uniform { hi } => (hi * (1.0 - a), hi * (1.0 - a / 2.0)),
    };
    if spec.centered {
        let m = spec.analytic_mean()?;
        Ok((var - m, cvar - m))
    } else {
        Ok((var, cvar))
    }
}

/// Two-large-samples recipe: VaR as the empirical quantile of one sample,
/// CVaR as the thresholded mean over an independent second sample. This is
/// the fallback ground truth for families without a usable closed form.
pub fn mc_var_cvar(spec: &DistSpec, alpha: RiskLevel, n: usize, seed: u64) -> Result<(f64, f64)> {
    let first = sample_stream(spec, n, seed, 0)?;
    let second = sample_stream(spec, n, seed, 1)?;
    let var = crate::cvar::var_order_stat(&first, alpha)?;
    let tail: f64 = second.values().iter().filter(|&&x| x >= var).sum();
    Ok((var, tail / (n as f64 * alpha.alpha())))
}

/// Solve for the family's scale knob so the inter-quartile range hits the
/// target width, by bisection on the analytic quantile function to 1e-9.
pub fn calibrate_iqr(spec: &DistSpec, target_width: f64) -> Result<DistSpec> {
    if !(target_width > 0.0) {
        return Err(Error::parameter("target IQR width must be positive"));
    }
    let with_knob = |knob: f64| -> DistSpec {
        let family = match spec.family {
            Family::FoldedNormal { .. } => Family::FoldedNormal { sigma: knob },
            Family::LogNormal { mu, .. } => Family::LogNormal { mu, sigma: knob },
            Family::Pareto { shape, .. } => Family::Pareto { shape, scale: knob },
            Family::Exponential { .. } => Family::Exponential { scale: knob },
            Family::Uniform { .. } => Family::Uniform { hi: knob },
            Family::Normal { .. } => Family::Normal { sigma: knob },
        };
        DistSpec {
            family,
            centered: spec.centered,
        }
    };
    let width = |knob: f64| -> Result<f64> { iqr(&with_knob(knob)) };

    let mut lo = 1e-12;
    let mut hi = 1.0;
    let mut grow = 0;
    while width(hi)? < target_width {
        hi *= 2.0;
        grow += 1;
        if grow > 60 {
            return Err(Error::Bracket(format!(
                "IQR calibration could not bracket width {target_width}"
            )));
        }
    }
    if width(lo)? > target_width {
        return Err(Error::Bracket(format!(
            "IQR calibration could not bracket width {target_width}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= 1e-9 * hi.max(1.0) {
            return Ok(with_knob(mid));
        }
        if width(mid)? < target_width {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(with_knob(0.5 * (lo + hi)))
}

/// Linear-regression data generator: x isotropic standard normal, noise
/// centered, y = <w*, x> + e.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionGen {
    pub w_star: Vec<f64>,
    /// Centered additive noise; None means exact interpolation (e = 0).
    pub noise: Option<DistSpec>,
}

impl RegressionGen {
    pub fn new(w_star: Vec<f64>, noise: DistSpec) -> Result<Self> {
        if w_star.is_empty() {
            return Err(Error::parameter("w_star must have dimension >= 1"));
        }
        if !noise.centered {
            return Err(Error::parameter(
                "regression noise must be centered (zero mean)",
            ));
        }
        noise.check_centerable()?;
        Ok(Self {
            w_star,
            noise: Some(noise),
        })
    }

    pub fn noiseless(w_star: Vec<f64>) -> Result<Self> {
        if w_star.is_empty() {
            return Err(Error::parameter("w_star must have dimension >= 1"));
        }
        Ok(Self {
            w_star,
            noise: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.w_star.len()
    }
}

/// Draw n regression pairs; features on sub-stream 0, noise on sub-stream 1.
pub fn gen_regression(gen: &RegressionGen, n: usize, seed: u64) -> Result<Vec<Datum>> {
    if n < 1 {
        return Err(Error::parameter("sample size must be at least 1"));
    }
    let d = gen.dim();
    let mut x_rng = DetRng::new(seed, 0);
    let mut e_rng = DetRng::new(seed, 1);
    let mut data = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..d)
            .map(|_| math::normal_inv_cdf(x_rng.uniform_open01()).expect("u in (0,1)"))
            .collect();
        let e = match &gen.noise {
            Some(spec) => spec.draw(e_rng.uniform_open01()),
            None => 0.0,
        };
        let y = crate::objective::dot(&gen.w_star, &x) + e;
        data.push(Datum::new(x, y));
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::LossModel;

    fn rl(alpha: f64) -> RiskLevel {
        RiskLevel::new(alpha).unwrap()
    }

    #[test]
    fn sampling_is_deterministic_per_seed_and_stream() {
        let spec = DistSpec::pareto(2.1, 3.5).unwrap();
        let a = sample(&spec, 100, 42).unwrap();
        let b = sample(&spec, 100, 42).unwrap();
        let c = sample(&spec, 100, 43).unwrap();
        let d = sample_stream(&spec, 100, 42, 1).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
        assert_ne!(a.values(), d.values());
    }

    #[test]
    fn pareto_support_bound() {
        let spec = DistSpec::pareto(2.1, 3.5).unwrap();
        let s = sample(&spec, 10_000, 7).unwrap();
        assert!(s.min() >= 3.5);
    }

    #[test]
    fn uniform_mean_clt() {
        let spec = DistSpec::uniform(1.0).unwrap();
        let s = sample(&spec, 1_000_000, 3).unwrap();
        let mean = math::mean(s.values());
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn exponential_oracle_values() {
        let spec = DistSpec::exponential(1.0).unwrap();
        let (var, cvar) = true_var_cvar(&spec, rl(0.05)).unwrap();
        assert!((var - 20.0f64.ln()).abs() < 1e-12);
        assert!((cvar - (20.0f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn pareto_oracle_formula() {
        let spec = DistSpec::pareto(2.1, 3.5).unwrap();
        let (var, cvar) = true_var_cvar(&spec, rl(0.05)).unwrap();
        let expected_var = 3.5 * 20.0f64.powf(1.0 / 2.1);
        let expected_cvar = 2.1 * 3.5 / 1.1 * 20.0f64.powf(1.0 / 2.1);
        assert!((var - expected_var).abs() < 1e-9);
        assert!((cvar - expected_cvar).abs() < 1e-9);
        assert!((cvar - 27.79).abs() / 27.79 < 0.01, "cvar {cvar}");
        // infinite-mean tails are rejected
        let heavy = DistSpec::pareto(0.9, 1.0).unwrap();
        assert!(true_var_cvar(&heavy, rl(0.05)).is_err());
    }

    #[test]
    fn folded_normal_quadrature_matches_closed_form() {
        // independent oracle: tail mean of |N(0, sigma^2)| above v is
        // 2 * sigma * phi(v/sigma) / alpha
        for sigma in [0.7, 1.0, 2.5204] {
            let spec = DistSpec::folded_normal(sigma).unwrap();
            for a in [0.02, 0.05, 0.25] {
                let (var, cvar) = true_var_cvar(&spec, rl(a)).unwrap();
                let closed = 2.0 * sigma * math::normal_pdf(var / sigma) / a;
                assert!(
                    ((cvar - closed) / closed).abs() < 1e-7,
                    "sigma={sigma} a={a}: {cvar} vs {closed}"
                );
                assert!(cvar >= var);
            }
        }
    }

    #[test]
    fn cvar_dominates_var_across_families() {
        let specs = [
            DistSpec::exponential(1.0).unwrap(),
            DistSpec::pareto(2.1, 3.5).unwrap(),
            DistSpec::log_normal(0.0, 1.75).unwrap(),
            DistSpec::folded_normal(1.0).unwrap(),
            DistSpec::normal(2.2).unwrap(),
            DistSpec::uniform(3.0).unwrap(),
        ];
        for spec in specs {
            for a in [0.01, 0.05, 0.2, 0.5] {
                let (var, cvar) = true_var_cvar(&spec, rl(a)).unwrap();
                assert!(cvar >= var, "{spec:?} alpha={a}: {cvar} < {var}");
            }
        }
    }

    #[test]
    fn normal_iqr_calibration_formula() {
        // width 3.4 => sigma = 3.4 / (2 * Phi^{-1}(0.75)) ~ 2.5204
        let spec = calibrate_iqr(&DistSpec::normal(1.0).unwrap(), 3.4).unwrap();
        let sigma = match spec.family {
            Family::Normal { sigma } => sigma,
            _ => unreachable!(),
        };
        let expected = 3.4 / (2.0 * math::normal_inv_cdf(0.75).unwrap());
        assert!((sigma - expected).abs() < 1e-7);
        assert!((sigma - 2.5204).abs() < 1e-3);
        assert!((iqr(&spec).unwrap() - 3.4).abs() < 1e-8);
    }

    #[test]
    fn paper_noise_settings_reproduce_iqr_three() {
        // b = 2.2 for the normal case, b = 1.75 for the log-normal case
        let normal = DistSpec::normal(2.2).unwrap();
        let log_normal = DistSpec::log_normal(0.0, 1.75).unwrap();
        assert!((iqr(&normal).unwrap() - 3.0).abs() / 3.0 < 0.05);
        assert!((iqr(&log_normal).unwrap() - 3.0).abs() / 3.0 < 0.05);
    }

    #[test]
    fn iqr_scales_linearly_in_the_scale_knob() {
        let base = DistSpec::pareto(2.1, 2.0).unwrap();
        let scaled = DistSpec::pareto(2.1, 6.0).unwrap();
        assert!(((iqr(&scaled).unwrap() / iqr(&base).unwrap()) - 3.0).abs() < 1e-12);
        let n1 = DistSpec::normal(1.0).unwrap();
        let n4 = DistSpec::normal(4.0).unwrap();
        assert!(((iqr(&n4).unwrap() / iqr(&n1).unwrap()) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn centering_shifts_quantiles_not_iqr() {
        let spec = DistSpec::exponential(2.0).unwrap();
        let c = spec.centered();
        assert!((iqr(&spec).unwrap() - iqr(&c).unwrap()).abs() < 1e-12);
        let m = spec.analytic_mean().unwrap();
        assert!((quantile(&spec, 0.5).unwrap() - quantile(&c, 0.5).unwrap() - m).abs() < 1e-12);
    }

    #[test]
    fn empirical_quantiles_match_analytic() {
        // 1e6 draws per family; quartiles within 0.01 * IQR
        let specs = [
            DistSpec::folded_normal(2.5204).unwrap(),
            DistSpec::log_normal(0.0, 1.75).unwrap(),
            DistSpec::pareto(2.1, 3.5).unwrap(),
            DistSpec::exponential(1.0).unwrap(),
            DistSpec::uniform(1.0).unwrap(),
            DistSpec::normal(2.2).unwrap(),
        ];
        for spec in specs {
            let s = sample(&spec, 1_000_000, 99).unwrap();
            let sorted = s.sorted();
            let width = iqr(&spec).unwrap();
            for p in [0.25, 0.5, 0.75] {
                let analytic = quantile(&spec, p).unwrap();
                let empirical = sorted[(p * 1e6) as usize];
                assert!(
                    (empirical - analytic).abs() < 0.01 * width,
                    "{spec:?} p={p}: {empirical} vs {analytic}"
                );
            }
        }
    }

    #[test]
    fn regression_generator_contract() {
        let gen = RegressionGen::noiseless(vec![1.0, -2.0]).unwrap();
        let data = gen_regression(&gen, 50, 5).unwrap();
        // exact interpolation: losses vanish at w = w*
        for z in &data {
            assert!(LossModel::Squared.loss(&[1.0, -2.0], z).abs() < 1e-24);
            assert!(LossModel::Absolute.loss(&[1.0, -2.0], z).abs() < 1e-12);
        }
        // determinism
        let again = gen_regression(&gen, 50, 5).unwrap();
        assert_eq!(data, again);
        // non-centered noise is rejected
        assert!(RegressionGen::new(vec![1.0], DistSpec::exponential(1.0).unwrap()).is_err());
    }

    #[test]
    fn noise_families_are_centered() {
        // empirical mean of e over 1e6 draws within 0.01 * IQR of zero
        let specs = [
            DistSpec::normal(2.2).unwrap().centered(),
            DistSpec::log_normal(0.0, 1.75).unwrap().centered(),
            DistSpec::pareto(2.1, 3.5).unwrap().centered(),
        ];
        for spec in specs {
            let s = sample(&spec, 1_000_000, 12).unwrap();
            let m = math::mean(s.values());
            let width = iqr(&spec).unwrap();
            assert!(m.abs() < 0.01 * width, "{spec:?} mean {m}");
        }
    }

    #[test]
    fn losses_are_non_negative_for_both_kinds() {
        let gen = RegressionGen::new(
            vec![0.3, 0.7],
            DistSpec::pareto(2.1, 3.5).unwrap().centered(),
        )
        .unwrap();
        let data = gen_regression(&gen, 500, 33).unwrap();
        for z in &data {
            assert!(LossModel::Squared.loss(&[0.1, -0.4], z) >= 0.0);
            assert!(LossModel::Absolute.loss(&[0.1, -0.4], z) >= 0.0);
        }
    }
}
