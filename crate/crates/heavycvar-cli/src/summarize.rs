//! Mean/std summary rows appended after each trial group.

use crate::rows::TrialRecord;

/// Push the trial rows followed by their summary rows.
///
/// Every group gets a `<metric>_mean` row; a `<metric>_std` row (sample
/// standard deviation) follows only when the group holds at least two
/// trials, since the n-1 denominator is undefined for a single trial.
/// Summary rows carry the base seed.
pub fn append_group_with_summary(
    rows: &mut Vec<TrialRecord>,
    trial_rows: Vec<TrialRecord>,
    base_seed: u64,
) {
    if trial_rows.is_empty() {
        return;
    }
    let count = trial_rows.len();
    let mean = trial_rows.iter().map(|r| r.metric_value).sum::<f64>() / count as f64;
    let template = trial_rows[0].clone();
    let metric = template.metric_name.clone();
    let std = if count >= 2 {
        let ss: f64 = trial_rows
            .iter()
            .map(|r| (r.metric_value - mean) * (r.metric_value - mean))
            .sum();
        Some((ss / (count - 1) as f64).sqrt())
    } else {
        None
    };
    rows.extend(trial_rows);
    let summary = |name: String, value: f64| TrialRecord {
        metric_name: name,
        metric_value: value,
        seed: base_seed,
        wall_ms: 0.0,
        ..template.clone()
    };
    rows.push(summary(format!("{metric}_mean"), mean));
    if let Some(std) = std {
        rows.push(summary(format!("{metric}_std"), std));
    }
}

/// True for rows produced by [`append_group_with_summary`] rather than
/// individual trials.
pub fn is_summary_row(record: &TrialRecord) -> bool {
    record.metric_name.ends_with("_mean") || record.metric_name.ends_with("_std")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64) -> TrialRecord {
        TrialRecord {
            experiment_id: "e".into(),
            method: "m".into(),
            family: "f".into(),
            n: 10,
            alpha: 0.05,
            delta: 0.02,
            seed: 99,
            metric_name: "abs_deviation".into(),
            metric_value: value,
            wall_ms: 0.0,
        }
    }

    #[test]
    fn single_trial_gets_mean_only() {
        let mut rows = Vec::new();
        append_group_with_summary(&mut rows, vec![row(3.0)], 7);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].metric_name, "abs_deviation_mean");
        assert_eq!(rows[1].metric_value, 3.0);
        assert_eq!(rows[1].seed, 7);
        assert!(is_summary_row(&rows[1]));
        assert!(!is_summary_row(&rows[0]));
    }

    #[test]
    fn summary_reproduces_mean_and_std() {
        let values = [1.0, 2.0, 4.0, 8.0];
        let mut rows = Vec::new();
        append_group_with_summary(&mut rows, values.iter().map(|&v| row(v)).collect(), 7);
        assert_eq!(rows.len(), 6);
        let mean = values.iter().sum::<f64>() / 4.0;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let std = (ss / 3.0).sqrt();
        assert!((rows[4].metric_value - mean).abs() < 1e-12);
        assert!((rows[5].metric_value - std).abs() < 1e-12);
    }
}
