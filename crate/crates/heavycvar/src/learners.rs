//! CVaR-minimizing learners.
//!
//! The headline routine partitions the training sample, runs an independent
//! averaged projected sub-gradient process on every block, and keeps the
//! candidate whose robustly estimated CVaR on a held-out validation sample is
//! smallest. Batch baselines (plain empirical-objective descent and two
//! robust-aggregation variants) share the same update loop with different
//! gradient aggregators.

use crate::cvar::{cvar_robust, RiskLevel};
use crate::error::{Error, Result};
use crate::objective::{
    empirical_objective, lipschitz_bound, project, surrogate_subgrad, Datum, JointPoint, LossModel,
};
use crate::robust_mean::{self, RMeanSpec};
use crate::sample::Sample;

/// Step size policy for the sub-gradient processes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    Fixed(f64),
    /// beta = sqrt((D^2 + V^2)/m) / L_alpha with D the domain diameter,
    /// V the v-cap, m the pass length and L_alpha the joint Lipschitz bound
    /// for a loss that is `loss_lipschitz`-Lipschitz in w.
    DomainLipschitz {
        loss_lipschitz: f64,
    },
}

/// Configuration shared by all learners.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub alpha: RiskLevel,
    pub delta: f64,
    pub k_partitions: usize,
    pub step_size: StepSize,
    /// Radius of the origin-centered feasible ball for w (diameter 2r).
    pub radius: f64,
    pub v_cap: f64,
    /// Total number of sub-gradient evaluations the learner may spend.
    pub budget: usize,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::parameter(format!(
                "delta must lie in (0,1), got {}",
                self.delta
            )));
        }
        if self.k_partitions < 1 {
            return Err(Error::parameter("k_partitions must be at least 1"));
        }
        if !(self.radius > 0.0) {
            return Err(Error::parameter("radius must be positive"));
        }
        if !(self.v_cap >= 0.0) {
            return Err(Error::parameter("v_cap must be non-negative"));
        }
        if let StepSize::Fixed(b) = self.step_size {
            if !(b > 0.0) {
                return Err(Error::parameter("step size must be positive"));
            }
        }
        Ok(())
    }

    fn resolve_step(&self, pass_len: usize) -> f64 {
        match self.step_size {
            StepSize::Fixed(b) => b,
            StepSize::DomainLipschitz { loss_lipschitz } => {
                let diameter = 2.0 * self.radius;
                let lip = lipschitz_bound(self.alpha, loss_lipschitz);
                ((diameter * diameter + self.v_cap * self.v_cap) / pass_len.max(1) as f64).sqrt()
                    / lip
            }
        }
    }
}

/// Partition count k = ceil(log(2 * ceil(log(1/delta)) / delta)) used when
/// only a confidence level is given.
pub fn default_partitions(delta: f64) -> usize {
    let k_inner = (1.0 / delta).ln().ceil().max(1.0);
    ((2.0 * k_inner / delta).ln().ceil() as usize).max(1)
}

/// Result of one averaged sub-gradient process.
#[derive(Debug, Clone, PartialEq)]
pub struct SgdTrace {
    /// Arithmetic average of the pre-update iterates p_0 .. p_{m-1}.
    pub final_average: JointPoint,
    pub steps_taken: usize,
    pub step_size_used: f64,
    /// Set when the supplied initial point was infeasible and got projected.
    pub init_projected: bool,
}

/// Averaged projected sub-gradient descent over a single pass.
///
/// Consumes the data in order for m = min(len, budget) steps and returns the
/// average of the m pre-update iterates, so a one-step run returns the
/// (projected) initial point.
pub fn sgd_averaged(
    data: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
) -> Result<SgdTrace> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    cfg.validate()?;
    let steps = data.len().min(cfg.budget);
    run_averaged_sgd(data, steps, init, cfg, model)
}

/// Core loop shared by the single-pass entry point and the multi-pass
/// sub-processes; cycles the block when `steps` exceeds its length.
fn run_averaged_sgd(
    block: &[Datum],
    steps: usize,
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
) -> Result<SgdTrace> {
    if steps == 0 {
        return Err(Error::parameter("sub-gradient budget of zero steps"));
    }
    let beta = cfg.resolve_step(steps);
    let start = project(init, cfg.radius, cfg.v_cap);
    let init_projected = start != *init;
    let mut point = start;
    let dim = point.dim();
    let mut sum_w = vec![0.0; dim];
    let mut sum_v = 0.0;
    for t in 0..steps {
        for (acc, wi) in sum_w.iter_mut().zip(&point.w) {
            *acc += wi;
        }
        sum_v += point.v;
        let z = &block[t % block.len()];
        let g = surrogate_subgrad(&point, z, cfg.alpha, model);
        let moved = JointPoint::new(
            point
                .w
                .iter()
                .zip(&g.dw)
                .map(|(wi, gi)| wi - beta * gi)
                .collect(),
            point.v - beta * g.dv,
        );
        point = project(&moved, cfg.radius, cfg.v_cap);
    }
    let inv = 1.0 / steps as f64;
    Ok(SgdTrace {
        final_average: JointPoint::new(sum_w.iter().map(|s| s * inv).collect(), sum_v * inv),
        steps_taken: steps,
        step_size_used: beta,
        init_projected,
    })
}

/// In-order partition of n items into k disjoint blocks covering everything,
/// each of size at least floor(n/k); the first n mod k blocks take one extra.
pub fn partition_ranges(n: usize, k: usize) -> Result<Vec<std::ops::Range<usize>>> {
    if k < 1 || k > n {
        return Err(Error::parameter(format!(
            "partition needs 1 <= k <= n, got k={k}, n={n}"
        )));
    }
    let base = n / k;
    let extra = n % k;
    let mut ranges = Vec::with_capacity(k);
    let mut start = 0;
    for j in 0..k {
        let len = base + usize::from(j < extra);
        ranges.push(start..start + len);
        start += len;
    }
    Ok(ranges)
}

/// Output of the partitioned learner with robust validation.
#[derive(Debug, Clone, PartialEq)]
pub struct RvOutcome {
    /// Candidate with the smallest robust validation score.
    pub selected: JointPoint,
    pub selected_index: usize,
    /// VaR estimate of the winning candidate's validation losses (the
    /// threshold Algorithm-style validation computes for it); the natural
    /// v to report alongside the selected parameter vector.
    pub selected_var: f64,
    /// Averaged iterate of every sub-process, in block order.
    pub candidates: Vec<JointPoint>,
    /// Scaled robust CVaR validation score of every candidate.
    pub scores: Vec<f64>,
    /// Steps taken by each sub-process.
    pub block_steps: Vec<usize>,
    /// Total sub-gradient evaluations spent; never exceeds cfg.budget.
    pub evals_used: usize,
}

/// Partitioned averaged-SGD learner with robust CVaR validation.
///
/// Splits the training sample into `k_partitions` in-order blocks, runs one
/// averaged sub-gradient process per block from the shared initial point,
/// and returns the candidate whose robust scaled CVaR estimate on the
/// independent validation sample is smallest (first index wins ties). With
/// budget = n each sub-process takes exactly one pass over its block; larger
/// budgets recycle each block cyclically.
pub fn rv_sgd_ave(
    train: &[Datum],
    validate: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
    rmean: &RMeanSpec,
) -> Result<RvOutcome> {
    cfg.validate()?;
    let n = train.len();
    if n == 0 || validate.is_empty() {
        return Err(Error::EmptySample);
    }
    if cfg.k_partitions > n {
        return Err(Error::parameter(format!(
            "k_partitions={} exceeds training size {n}",
            cfg.k_partitions
        )));
    }
    if cfg.budget < n {
        return Err(Error::parameter(format!(
            "budget {} below one pass over n={n} points",
            cfg.budget
        )));
    }
    let passes = cfg.budget / n;
    let ranges = partition_ranges(n, cfg.k_partitions)?;
    let mut candidates = Vec::with_capacity(ranges.len());
    let mut block_steps = Vec::with_capacity(ranges.len());
    let mut evals_used = 0;
    for range in &ranges {
        let block = &train[range.clone()];
        let steps = block.len() * passes;
        let trace = run_averaged_sgd(block, steps, init, cfg, model)?;
        evals_used += trace.steps_taken;
        block_steps.push(trace.steps_taken);
        candidates.push(trace.final_average);
    }
    let validation = select_candidate(&candidates, validate, cfg.alpha, rmean, model)?;
    let selected_index = validation.best;
    Ok(RvOutcome {
        selected: candidates[selected_index].clone(),
        selected_index,
        selected_var: validation.vhats[selected_index],
        candidates,
        scores: validation.chat_primes,
        block_steps,
        evals_used,
    })
}

/// Scores and thresholds produced by the robust validation step.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationScores {
    /// Argmin of the scaled CVaR scores; first index wins ties.
    pub best: usize,
    /// Scaled robust CVaR estimate per candidate.
    pub chat_primes: Vec<f64>,
    /// VaR threshold of each candidate's validation losses.
    pub vhats: Vec<f64>,
}

/// Robust validation step, exposed for direct testing: scores every
/// candidate by the scaled robust CVaR of its validation losses.
///
/// The validation losses are split in half in given order; the second half
/// fixes the tail threshold, the first is robustly averaged.
pub fn select_candidate(
    candidates: &[JointPoint],
    validate: &[Datum],
    alpha: RiskLevel,
    rmean: &RMeanSpec,
    model: LossModel,
) -> Result<ValidationScores> {
    if candidates.is_empty() {
        return Err(Error::parameter("no candidates to select from"));
    }
    let m = validate.len();
    if m < 2 {
        return Err(Error::parameter(
            "validation sample must hold at least two points",
        ));
    }
    let split = m / 2;
    let mut chat_primes = Vec::with_capacity(candidates.len());
    let mut vhats = Vec::with_capacity(candidates.len());
    for cand in candidates {
        let losses: Vec<f64> = validate.iter().map(|z| model.loss(&cand.w, z)).collect();
        let x_half = Sample::from_slice(&losses[..split])?;
        let y_half = Sample::from_slice(&losses[split..])?;
        let est = cvar_robust(&x_half, &y_half, alpha, rmean)?;
        chat_primes.push(est.chat_prime);
        vhats.push(est.vhat);
    }
    let mut best = 0;
    for (j, &s) in chat_primes.iter().enumerate().skip(1) {
        if s < chat_primes[best] {
            best = j;
        }
    }
    Ok(ValidationScores {
        best,
        chat_primes,
        vhats,
    })
}

/// How a batch learner aggregates the n per-datum sub-gradients.
#[derive(Debug, Clone, PartialEq)]
pub enum GradAggregator {
    Mean,
    /// Coordinate-wise Catoni M-estimate with automatic scale.
    CatoniAuto {
        delta: f64,
    },
    /// Coordinate-wise median-of-means.
    MedianOfMeans {
        blocks: usize,
    },
}

/// Coordinate-wise robust aggregation of joint sub-gradients (d+1 coords).
/// Exposed for direct testing of outlier suppression.
pub fn aggregate_subgradients(
    grads_w: &[Vec<f64>],
    grads_v: &[f64],
    aggregator: &GradAggregator,
) -> Result<(Vec<f64>, f64)> {
    let n = grads_v.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let dim = grads_w[0].len();
    let reduce = |coord: Vec<f64>| -> Result<f64> {
        match aggregator {
            GradAggregator::Mean => Ok(coord.iter().sum::<f64>() / coord.len() as f64),
            GradAggregator::CatoniAuto { delta } => {
                let s = Sample::new(coord)?;
                let scale = robust_mean::auto_scale(&s, *delta)?.scale;
                robust_mean::mean_catoni(&s, scale, robust_mean::CATONI_TOL)
            }
            GradAggregator::MedianOfMeans { blocks } => {
                let s = Sample::new(coord)?;
                robust_mean::mean_mom(&s, (*blocks).min(s.len()))
            }
        }
    };
    let mut dw = Vec::with_capacity(dim);
    for i in 0..dim {
        dw.push(reduce(grads_w.iter().map(|g| g[i]).collect())?);
    }
    let dv = reduce(grads_v.to_vec())?;
    Ok((dw, dv))
}

/// Final iterate of a batch descent run plus its accounting.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchTrace {
    pub point: JointPoint,
    pub iterations: usize,
    pub step_size_used: f64,
}

fn batch_descent(
    train: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
    aggregator: &GradAggregator,
) -> Result<BatchTrace> {
    cfg.validate()?;
    let n = train.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let iterations = cfg.budget / n;
    let beta = cfg.resolve_step(iterations.max(1));
    let mut point = project(init, cfg.radius, cfg.v_cap);
    for _ in 0..iterations {
        let mut grads_w = Vec::with_capacity(n);
        let mut grads_v = Vec::with_capacity(n);
        for z in train {
            let g = surrogate_subgrad(&point, z, cfg.alpha, model);
            grads_w.push(g.dw);
            grads_v.push(g.dv);
        }
        let (dw, dv) = aggregate_subgradients(&grads_w, &grads_v, aggregator)?;
        let moved = JointPoint::new(
            point
                .w
                .iter()
                .zip(&dw)
                .map(|(wi, gi)| wi - beta * gi)
                .collect(),
            point.v - beta * dv,
        );
        point = project(&moved, cfg.radius, cfg.v_cap);
    }
    Ok(BatchTrace {
        point,
        iterations,
        step_size_used: beta,
    })
}

/// Batch sub-gradient descent on the empirical surrogate objective.
/// Each pass over the n training points costs n evaluations.
pub fn erm_gd(
    train: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
) -> Result<BatchTrace> {
    batch_descent(train, init, cfg, model, &GradAggregator::Mean)
}

/// Batch descent with Catoni M-estimation of each gradient coordinate.
pub fn rgd_m(
    train: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
) -> Result<BatchTrace> {
    batch_descent(
        train,
        init,
        cfg,
        model,
        &GradAggregator::CatoniAuto { delta: cfg.delta },
    )
}

/// Batch descent with median-of-means aggregation of each gradient
/// coordinate, using k = 1 + ceil(3.5 log(1/delta)) blocks.
pub fn rgd_mom(
    train: &[Datum],
    init: &JointPoint,
    cfg: &LearnerConfig,
    model: LossModel,
) -> Result<BatchTrace> {
    let blocks = robust_mean::mom_blocks_conservative(cfg.delta);
    batch_descent(
        train,
        init,
        cfg,
        model,
        &GradAggregator::MedianOfMeans { blocks },
    )
}

/// Batch oracle: long decayed-step descent used to pin the best attainable
/// objective value on a reference sample.
///
/// Runs full-batch sub-gradient steps with beta_t = beta0 / sqrt(t) and
/// tracks the running minimum of the empirical objective; stops once the
/// last 100 improvements stay within `tol` or the iteration cap is hit.
#[allow(clippy::too_many_arguments)]
pub fn batch_oracle_min(
    data: &[Datum],
    init: &JointPoint,
    alpha: RiskLevel,
    model: LossModel,
    radius: f64,
    v_cap: f64,
    beta0: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(JointPoint, f64, bool)> {
    if data.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = data.len();
    let mut point = project(init, radius, v_cap);
    let mut best_point = point.clone();
    let mut best = empirical_objective(&point, data, alpha, model)?;
    let mut window_start = best;
    let mut converged = false;
    for t in 1..=max_iters {
        let beta = beta0 / (t as f64).sqrt();
        let mut sum_w = vec![0.0; point.dim()];
        let mut sum_v = 0.0;
        for z in data {
            let g = surrogate_subgrad(&point, z, alpha, model);
            for (acc, gi) in sum_w.iter_mut().zip(&g.dw) {
                *acc += gi;
            }
            sum_v += g.dv;
        }
        let inv = 1.0 / n as f64;
        let moved = JointPoint::new(
            point
                .w
                .iter()
                .zip(&sum_w)
                .map(|(wi, gi)| wi - beta * gi * inv)
                .collect(),
            point.v - beta * sum_v * inv,
        );
        point = project(&moved, radius, v_cap);
        let value = empirical_objective(&point, data, alpha, model)?;
        if value < best {
            best = value;
            best_point = point.clone();
        }
        if t % 100 == 0 {
            if (window_start - best).abs() <= tol {
                converged = true;
                break;
            }
            window_start = best;
        }
    }
    Ok((best_point, best, converged))
}
