//! CLI behavior: exit codes, row accounting, plot edge cases.

use std::path::PathBuf;

use heavycvar_cli::rows::{read_csv, CSV_HEADER};
use heavycvar_cli::summarize::is_summary_row;

fn run(args: &[&str]) -> (i32, String, String) {
    let argv: Vec<String> = std::iter::once("heavycvar".to_string())
        .chain(args.iter().map(|s| s.to_string()))
        .collect();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = heavycvar_cli::cli_entry(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("heavycvar-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn estimate_prints_hand_example_value() {
    let dir = temp_dir("est");
    let file = dir.join("vals.txt");
    std::fs::write(&file, "1 2 3 4\n").unwrap();
    let (code, out, err) = run(&[
        "estimate",
        "--method",
        "empirical",
        "--alpha",
        "0.5",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    assert_eq!(out, "4.5\n");

    // every method id runs on the same file
    for method in ["mom", "catoni", "cat-12", "lm", "hol", "r-trunc"] {
        let (code, out, err) = run(&[
            "estimate",
            "--method",
            method,
            "--alpha",
            "0.5",
            file.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{method}: {err}");
        let value: f64 = out.trim().parse().unwrap();
        assert!(value.is_finite(), "{method} -> {out}");
    }

    // comma-separated input parses to the same sample
    let csv_file = dir.join("vals.csv");
    std::fs::write(&csv_file, "1,2,3\n4\n").unwrap();
    let (code, out, _) = run(&[
        "estimate",
        "--method",
        "empirical",
        "--alpha",
        "0.5",
        csv_file.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "4.5\n");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn alpha_out_of_range_exits_two_with_message() {
    let dir = temp_dir("range");
    let file = dir.join("vals.txt");
    std::fs::write(&file, "1 2 3 4\n").unwrap();
    let (code, _, err) = run(&[
        "estimate",
        "--method",
        "empirical",
        "--alpha",
        "1.5",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("(0,1)"), "message: {err}");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn usage_errors_exit_two() {
    let (code, _, err) = run(&["estimate", "--method", "empirical", "--no-such-flag"]);
    assert_eq!(code, 2);
    assert!(!err.is_empty());
    let (code, _, _) = run(&["no-such-subcommand"]);
    assert_eq!(code, 2);
    let (code, _, err) = run(&["bench-pointwise", "--preset", "galaxy"]);
    assert_eq!(code, 2);
    assert!(err.contains("preset"));
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("bench-pointwise"));
}

#[test]
fn missing_input_file_exits_one() {
    let (code, _, err) = run(&[
        "estimate",
        "--method",
        "empirical",
        "--alpha",
        "0.5",
        "/definitely/not/here.txt",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("cannot read"));
}

#[test]
fn pointwise_row_accounting_single_trial() {
    let dir = temp_dir("rows");
    let conf = dir.join("one.conf");
    std::fs::write(&conf, "families=pareto\nn_grid=500\nalpha_grid=0.1\n").unwrap();
    let (code, _, err) = run(&[
        "bench-pointwise",
        "--trials",
        "1",
        "--seed",
        "5",
        "--out",
        dir.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let rows = read_csv(&dir.join("pointwise.csv")).unwrap();
    // one setting, four methods: exactly 4 trial rows + 4 summary rows
    let (summary, trial): (Vec<_>, Vec<_>) = rows.iter().partition(|r| is_summary_row(r));
    assert_eq!(trial.len(), 4);
    assert_eq!(summary.len(), 4);
    for s in &summary {
        assert!(s.metric_name.ends_with("_mean"));
    }
    // header is exact
    let text = std::fs::read_to_string(dir.join("pointwise.csv")).unwrap();
    assert!(text.starts_with(&format!("{CSV_HEADER}\n")));
    assert!(!text.contains('\r'));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn summary_rows_reproduce_trial_statistics() {
    let dir = temp_dir("sumstat");
    let conf = dir.join("one.conf");
    std::fs::write(&conf, "families=exponential\nn_grid=400\nalpha_grid=0.2\n").unwrap();
    let (code, _, err) = run(&[
        "bench-pointwise",
        "--trials",
        "6",
        "--seed",
        "11",
        "--out",
        dir.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let rows = read_csv(&dir.join("pointwise.csv")).unwrap();
    for method in ["empirical", "r-trunc", "mom", "cat-12"] {
        let values: Vec<f64> = rows
            .iter()
            .filter(|r| r.method == method && !is_summary_row(r))
            .map(|r| r.metric_value)
            .collect();
        assert_eq!(values.len(), 6);
        let mean = values.iter().sum::<f64>() / 6.0;
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        let std = (ss / 5.0).sqrt();
        let get = |suffix: &str| -> f64 {
            rows.iter()
                .find(|r| r.method == method && r.metric_name == format!("abs_deviation{suffix}"))
                .unwrap()
                .metric_value
        };
        assert!((get("_mean") - mean).abs() <= 1e-12 * mean.abs().max(1.0));
        assert!((get("_std") - std).abs() <= 1e-12 * std.abs().max(1.0));
    }
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn learning_rows_and_budget_checkpoints() {
    let dir = temp_dir("learn");
    let conf = dir.join("learn.conf");
    std::fs::write(
        &conf,
        "families=pareto\ntest_size=2000\ncheckpoints=5\nn_learning=200\n",
    )
    .unwrap();
    let (code, _, err) = run(&[
        "bench-learning",
        "--trials",
        "2",
        "--seed",
        "9",
        "--out",
        dir.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    let rows = read_csv(&dir.join("learning.csv")).unwrap();
    // 2 settings (squared/absolute) x 4 methods x 5 checkpoints x (2 trials + mean + std)
    assert_eq!(rows.len(), 2 * 4 * 5 * 4);
    for r in &rows {
        assert_eq!(r.alpha, 0.05);
        assert!(r.metric_value.is_finite());
        assert!(r.experiment_id.contains("n=200"));
    }
    // checkpoint budgets are monotone within each (experiment, method) group
    for exp in [
        "learn:pareto:squared:n=200:d=2",
        "learn:pareto:absolute:n=200:d=2",
    ] {
        for method in ["rv-sgdave", "erm-gd", "rgd-m", "rgd-mom"] {
            let budgets: Vec<u64> = rows
                .iter()
                .filter(|r| {
                    r.experiment_id == exp
                        && r.method == method
                        && is_summary_row(r)
                        && r.metric_name.ends_with("_mean")
                })
                .map(|r| r.n)
                .collect();
            assert_eq!(budgets.len(), 5, "{exp} {method}");
            assert!(budgets.windows(2).all(|w| w[1] > w[0]), "{budgets:?}");
        }
    }
    // risk-vs-budget plot renders from this CSV
    let (code, out, err) = run(&[
        "plot",
        "--kind",
        "risk-vs-budget",
        dir.join("learning.csv").to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.lines().count() >= 2);
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn plot_errors_on_empty_data_region() {
    let dir = temp_dir("plotempty");
    let csv = dir.join("empty.csv");
    std::fs::write(&csv, format!("{CSV_HEADER}\n")).unwrap();
    let (code, _, err) = run(&["plot", "--kind", "deviation-vs-n", csv.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("empty data region"), "{err}");

    // schema mismatch reports the line number
    let bad = dir.join("bad.csv");
    std::fs::write(&bad, format!("{CSV_HEADER}\nnot,enough,fields\n")).unwrap();
    let (code, _, err) = run(&["plot", "--kind", "deviation-vs-n", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 2"), "{err}");
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn plot_single_point_is_valid_svg_with_marker() {
    let dir = temp_dir("plotone");
    let csv = dir.join("one.csv");
    std::fs::write(
        &csv,
        format!(
            "{CSV_HEADER}\npw:pareto:n=1000:a=0.05,cat-12,pareto,1000,5.0e-2,2.0e-2,1,abs_deviation,1.25e0,0.0e0\n"
        ),
    )
    .unwrap();
    let (code, out, err) = run(&["plot", "--kind", "deviation-vs-n", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "stderr: {err}");
    let path = out.trim().strip_prefix("wrote ").unwrap();
    let svg = std::fs::read_to_string(path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("<circle"));
    assert!(svg.contains("cat-12"));
    let _ = std::fs::remove_dir_all(dir);
}

#[test]
fn thread_cap_does_not_change_output_bytes() {
    let dir = temp_dir("threads");
    let conf = dir.join("one.conf");
    std::fs::write(&conf, "families=pareto\nn_grid=500\nalpha_grid=0.1\n").unwrap();
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    std::env::set_var("HEAVYCVAR_THREADS", "1");
    let (code, _, _) = run(&[
        "bench-pointwise",
        "--trials",
        "3",
        "--seed",
        "2",
        "--out",
        out_a.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    std::env::remove_var("HEAVYCVAR_THREADS");
    let (code, _, _) = run(&[
        "bench-pointwise",
        "--trials",
        "3",
        "--seed",
        "2",
        "--out",
        out_b.to_str().unwrap(),
        "--config",
        conf.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let a = std::fs::read(out_a.join("pointwise.csv")).unwrap();
    let b = std::fs::read(out_b.join("pointwise.csv")).unwrap();
    assert_eq!(a, b);
    let _ = std::fs::remove_dir_all(dir);
}
