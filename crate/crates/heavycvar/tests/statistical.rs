//! Monte Carlo invariants that are too heavy for inline unit tests.

use rayon::prelude::*;

use heavycvar::cvar::{cvar_empirical, cvar_r_trunc, RiskLevel};
use heavycvar::synth::{mc_var_cvar, sample_stream, true_var_cvar, DistSpec};

/// The two-large-samples recipe at n=1e7 reproduces the analytic CVaR
/// within 3% at alpha = 0.05 for every supported family.
#[test]
fn two_sample_recipe_matches_analytic_oracles() {
    let alpha = RiskLevel::new(0.05).unwrap();
    let specs = [
        DistSpec::exponential(1.0).unwrap(),
        DistSpec::pareto(2.1, 3.5).unwrap(),
        DistSpec::log_normal(0.0, 1.75).unwrap(),
        DistSpec::folded_normal(2.5204).unwrap(),
        DistSpec::normal(2.2).unwrap(),
        DistSpec::uniform(3.0).unwrap(),
    ];
    let results: Vec<(String, f64, f64)> = specs
        .par_iter()
        .map(|spec| {
            let (_, analytic) = true_var_cvar(spec, alpha).unwrap();
            let (_, mc) = mc_var_cvar(spec, alpha, 10_000_000, 424_242).unwrap();
            (format!("{spec:?}"), analytic, mc)
        })
        .collect();
    for (name, analytic, mc) in results {
        let rel = ((mc - analytic) / analytic).abs();
        assert!(
            rel <= 0.03,
            "{name}: monte carlo {mc} vs analytic {analytic} (rel {rel:.4})"
        );
    }
}

/// Random-truncation baseline: finite, and below the single-sample empirical
/// estimate in median over 1000 heavy-tailed trials (truncation strips the
/// extreme outliers the empirical tail sum chases).
#[test]
fn random_truncation_sits_below_empirical_in_median() {
    let spec = DistSpec::pareto(2.1, 3.5).unwrap();
    let alpha = RiskLevel::new(0.05).unwrap();
    let delta = 0.02;
    let n = 10_000;
    let pairs: Vec<(f64, f64)> = (0..1000u64)
        .into_par_iter()
        .map(|trial| {
            let x = sample_stream(&spec, n, 300_000 + trial, 0).unwrap();
            let y = sample_stream(&spec, n, 300_000 + trial, 1).unwrap();
            let rt = cvar_r_trunc(&x, &y, alpha, delta).unwrap();
            let emp = cvar_empirical(&x, alpha).unwrap();
            assert!(rt.is_finite());
            (rt, emp)
        })
        .collect();
    let median = |mut v: Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let med_rt = median(pairs.iter().map(|p| p.0).collect());
    let med_emp = median(pairs.iter().map(|p| p.1).collect());
    assert!(
        med_rt < med_emp,
        "median r-trunc {med_rt} vs empirical {med_emp}"
    );
}
