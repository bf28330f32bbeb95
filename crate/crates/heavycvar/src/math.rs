//! Scalar numerics: normal CDF/quantile, quadrature, 1-d minimization.

use crate::error::{Error, Result};

/// Standard normal CDF via the complementary error function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal quantile function.
///
/// Rational approximation (Acklam form, max relative error about 1.15e-9)
/// followed by one Halley refinement against the erfc-based CDF, which takes
/// the result to near machine precision.
pub fn normal_inv_cdf(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!(
            "quantile probability must lie in (0,1), got {p}"
        )));
    }

    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };

    // Halley step: e = F(x) - p, x' = x - 2e/(2F'(x) + e x).
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    Ok(x - u / (1.0 + 0.5 * x * u))
}

/// Inverse of erf, expressed through the normal quantile.
pub fn erf_inv(y: f64) -> Result<f64> {
    Ok(normal_inv_cdf((y + 1.0) / 2.0)? / std::f64::consts::SQRT_2)
}

/// Adaptive Simpson quadrature on [a, b] to the requested relative error.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
        }
    }

    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(f, a, fa, b, fb);
    let scale = whole.abs().max(1e-300);
    recurse(f, a, fa, b, fb, whole, m, fm, rel_tol * scale, 60)
}

/// Golden-section search for the minimum of a unimodal function on [a, b].
///
/// Returns (argmin, min). `x_tol` bounds the bracket width at return.
pub fn golden_section_min<F: Fn(f64) -> f64>(
    f: &F,
    mut a: f64,
    mut b: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > x_tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Median of a slice (midpoint of the two central values for even lengths).
pub fn median(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Arithmetic mean of a slice.
pub fn mean(values: &[f64]) -> f64 {
    debug_assert!(!values.is_empty());
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation (n-1 denominator); 0 for a single value.
pub fn sample_std(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|&v| (v - m) * (v - m)).sum();
    (ss / (n - 1) as f64).sqrt()
}

/// Floor of `x` that snaps to the nearest integer when `x` sits within a tiny
/// relative distance of it.
///
/// Order-statistic indices are specified as floor((1-alpha)*n); computing the
/// product in f64 can land an ulp below the intended integer (e.g.
/// 0.95 * 200 < 190). Snapping keeps the index at its exact-arithmetic value
/// for any alpha that is a short decimal.
pub fn floor_stable(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r
    } else {
        x.floor()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_quantile_matches_known_points() {
        assert!(normal_inv_cdf(0.5).unwrap().abs() < 1e-14);
        // Phi^{-1}(0.975) = 1.959963984540054...
        assert!((normal_inv_cdf(0.975).unwrap() - 1.959963984540054).abs() < 1e-11);
        // round trip across the range, including the tail branches
        for &p in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6] {
            let x = normal_inv_cdf(p).unwrap();
            assert!(
                (normal_cdf(x) - p).abs() <= 1e-12 * p.max(1e-3),
                "p={p} x={x} cdf={}",
                normal_cdf(x)
            );
        }
        assert!(normal_inv_cdf(0.0).is_err());
        assert!(normal_inv_cdf(1.0).is_err());
    }

    #[test]
    fn quantile_of_three_quarters() {
        // used by inter-quartile calibration: Phi^{-1}(0.75) = 0.674489750196082
        assert!((normal_inv_cdf(0.75).unwrap() - 0.674489750196082).abs() < 1e-12);
    }

    #[test]
    fn simpson_integrates_polynomial_exactly() {
        // cubic is exact for Simpson
        let f = |x: f64| 3.0 * x * x;
        let v = integrate_adaptive(&f, 0.0, 2.0, 1e-12);
        assert!((v - 8.0).abs() < 1e-10);
    }

    #[test]
    fn simpson_gaussian_tail() {
        // integral of the standard normal pdf over [0, inf) = 1/2
        let v = integrate_adaptive(&normal_pdf, 0.0, 40.0, 1e-10);
        assert!((v - 0.5).abs() < 1e-9);
    }

    #[test]
    fn golden_section_finds_parabola_min() {
        let (x, fx) = golden_section_min(&|x| (x - 1.25) * (x - 1.25) + 3.0, -4.0, 8.0, 1e-10);
        // argmin resolution is limited to ~sqrt(eps * f / f'') for f ~ 3
        assert!((x - 1.25).abs() < 1e-6);
        assert!((fx - 3.0).abs() < 1e-12);
    }

    #[test]
    fn median_conventions() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert_eq!(median(&[7.0]), 7.0);
    }

    #[test]
    fn floor_stable_snaps_near_integers() {
        assert_eq!(floor_stable(0.95f64 * 200.0), 190.0); // plain floor gives 189
        assert_eq!(floor_stable(0.9f64 * 10.0), 9.0);
        assert_eq!(floor_stable(2.0), 2.0);
        assert_eq!(floor_stable(2.7), 2.0);
        assert_eq!(floor_stable(189.4), 189.0);
    }
}
