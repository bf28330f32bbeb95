//! The CVaR surrogate objective, its exact sub-differential, and the joint
//! domain projection.
//!
//! Minimizing `v + E[loss - v]_+ / alpha` jointly over the parameter vector
//! and the scalar v is equivalent to minimizing CVaR itself; the minimum over
//! v alone recovers CVaR at fixed parameters. Everything here is convex, and
//! the sub-differential is piecewise explicit, so projected sub-gradient
//! methods apply directly.

use crate::cvar::RiskLevel;
use crate::error::{Error, Result};

/// Joint optimization state: parameter vector plus the VaR-surrogate scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPoint {
    pub w: Vec<f64>,
    pub v: f64,
}

impl JointPoint {
    pub fn new(w: Vec<f64>, v: f64) -> Self {
        Self { w, v }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            w: vec![0.0; dim],
            v: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }
}

/// One observation of the regression pair (x, y).
#[derive(Debug, Clone, PartialEq)]
pub struct Datum {
    pub x: Vec<f64>,
    pub y: f64,
}

impl Datum {
    pub fn new(x: Vec<f64>, y: f64) -> Self {
        Self { x, y }
    }
}

/// Loss family evaluated on a linear predictor.
///
/// With residual r = <w, x> - y the squared loss is r^2/2 and the absolute
/// loss is |r|; the gradient convention at the absolute loss's kink is
/// sign(0) = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossModel {
    Squared,
    Absolute,
}

impl LossModel {
    pub fn id(&self) -> &'static str {
        match self {
            LossModel::Squared => "squared",
            LossModel::Absolute => "absolute",
        }
    }

    pub fn loss(&self, w: &[f64], z: &Datum) -> f64 {
        let r = dot(w, &z.x) - z.y;
        match self {
            LossModel::Squared => 0.5 * r * r,
            LossModel::Absolute => r.abs(),
        }
    }

    /// Gradient of the loss in w.
    pub fn grad(&self, w: &[f64], z: &Datum) -> Vec<f64> {
        let r = dot(w, &z.x) - z.y;
        let factor = match self {
            LossModel::Squared => r,
            LossModel::Absolute => {
                if r > 0.0 {
                    1.0
                } else if r < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        };
        z.x.iter().map(|&xi| factor * xi).collect()
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l2_norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Surrogate value v + [loss - v]_+ / alpha.
pub fn surrogate_value(loss_value: f64, v: f64, alpha: RiskLevel) -> f64 {
    v + (loss_value - v).max(0.0) / alpha.alpha()
}

/// Joint sub-gradient of the surrogate in (w, v).
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateSubgrad {
    pub dw: Vec<f64>,
    pub dv: f64,
}

impl SurrogateSubgrad {
    pub fn joint_norm(&self) -> f64 {
        (dot(&self.dw, &self.dw) + self.dv * self.dv).sqrt()
    }
}

/// Exact sub-gradient of (w, v) -> surrogate(loss(w; z), v).
///
/// For loss > v the direction is (grad loss / alpha, (alpha-1)/alpha); for
/// loss < v it is (0, 1). Ties at loss = v take the first branch, matching
/// the ">=" indicator convention used by the estimators.
pub fn surrogate_subgrad(
    point: &JointPoint,
    z: &Datum,
    alpha: RiskLevel,
    model: LossModel,
) -> SurrogateSubgrad {
    let a = alpha.alpha();
    let loss = model.loss(&point.w, z);
    if loss >= point.v {
        let dw = model.grad(&point.w, z).into_iter().map(|g| g / a).collect();
        SurrogateSubgrad {
            dw,
            dv: (a - 1.0) / a,
        }
    } else {
        SurrogateSubgrad {
            dw: vec![0.0; point.dim()],
            dv: 1.0,
        }
    }
}

/// Project onto the feasible set: the origin-centered l2 ball of the given
/// radius for w, the interval [0, v_cap] for v.
///
/// Idempotent bit for bit: after radial scaling the norm is nudged below the
/// radius so a second projection is the identity.
pub fn project(point: &JointPoint, radius: f64, v_cap: f64) -> JointPoint {
    debug_assert!(radius > 0.0 && v_cap >= 0.0);
    let mut w = point.w.clone();
    let norm = l2_norm(&w);
    if norm > radius {
        let scale = radius / norm;
        for wi in &mut w {
            *wi *= scale;
        }
        // rounding can leave the rescaled norm an ulp above the radius
        while l2_norm(&w) > radius {
            for wi in &mut w {
                *wi *= 1.0 - f64::EPSILON;
            }
        }
    }
    JointPoint {
        w,
        v: point.v.clamp(0.0, v_cap),
    }
}

/// Lipschitz constant of the joint surrogate: max{1, sqrt(L^2 + (1-a)^2)/a}
/// for an L-Lipschitz loss.
pub fn lipschitz_bound(alpha: RiskLevel, loss_lipschitz: f64) -> f64 {
    let a = alpha.alpha();
    let main = (loss_lipschitz * loss_lipschitz + (1.0 - a) * (1.0 - a)).sqrt() / a;
    main.max(1.0)
}

/// Empirical surrogate objective: mean of the surrogate over the data.
pub fn empirical_objective(
    point: &JointPoint,
    data: &[Datum],
    alpha: RiskLevel,
    model: LossModel,
) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    let sum: f64 = data
        .iter()
        .map(|z| surrogate_value(model.loss(&point.w, z), point.v, alpha))
        .sum();
    Ok(sum / data.len() as f64)
}
