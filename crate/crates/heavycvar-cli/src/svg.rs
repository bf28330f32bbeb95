//! Deterministic SVG rendering of benchmark CSVs: mean lines with +-std
//! bands per method.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::rows::{read_csv, TrialRecord};
use crate::summarize::is_summary_row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    DeviationVsN,
    DeviationVsAlpha,
    RiskVsBudget,
}

impl PlotKind {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "deviation-vs-n" => Ok(PlotKind::DeviationVsN),
            "deviation-vs-alpha" => Ok(PlotKind::DeviationVsAlpha),
            "risk-vs-budget" => Ok(PlotKind::RiskVsBudget),
            other => Err(CliError::usage(format!(
                "unknown plot kind {other:?} (expected deviation-vs-n, deviation-vs-alpha or risk-vs-budget)"
            ))),
        }
    }

    fn id(&self) -> &'static str {
        match self {
            PlotKind::DeviationVsN => "deviation-vs-n",
            PlotKind::DeviationVsAlpha => "deviation-vs-alpha",
            PlotKind::RiskVsBudget => "risk-vs-budget",
        }
    }

    fn metric(&self) -> &'static str {
        match self {
            PlotKind::DeviationVsN | PlotKind::DeviationVsAlpha => "abs_deviation",
            PlotKind::RiskVsBudget => "excess_cvar_risk",
        }
    }

    fn log_x(&self) -> bool {
        !matches!(self, PlotKind::DeviationVsAlpha)
    }

    fn x_label(&self) -> &'static str {
        match self {
            PlotKind::DeviationVsN => "sample size n",
            PlotKind::DeviationVsAlpha => "risk level alpha",
            PlotKind::RiskVsBudget => "budget (gradient evaluations)",
        }
    }

    fn x_value(&self, r: &TrialRecord) -> f64 {
        match self {
            PlotKind::DeviationVsN | PlotKind::RiskVsBudget => r.n as f64,
            PlotKind::DeviationVsAlpha => r.alpha,
        }
    }

    /// Group identity: one SVG per group, holding the coordinates that stay
    /// fixed inside the plot.
    fn group_key(&self, r: &TrialRecord) -> String {
        match self {
            PlotKind::DeviationVsN => format!("{}_a={}", r.family, r.alpha),
            PlotKind::DeviationVsAlpha => format!("{}_n={}", r.family, r.n),
            PlotKind::RiskVsBudget => r.experiment_id.clone(),
        }
    }
}

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN_L: f64 = 72.0;
const MARGIN_R: f64 = 20.0;
const MARGIN_T: f64 = 32.0;
const MARGIN_B: f64 = 52.0;

/// Render one SVG per group found in the CSV; returns the written paths.
pub fn plot(csv: &Path, kind: PlotKind, out_dir: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let rows = read_csv(csv)?;
    let trials: Vec<&TrialRecord> = rows
        .iter()
        .filter(|r| !is_summary_row(r) && r.metric_name == kind.metric())
        .collect();
    if trials.is_empty() {
        return Err(CliError::runtime(format!(
            "empty data region: no {} trial rows in {}",
            kind.metric(),
            csv.display()
        )));
    }

    // group -> method -> x -> values
    type Series = BTreeMap<String, BTreeMap<u64, (f64, Vec<f64>)>>;
    let mut groups: BTreeMap<String, Series> = BTreeMap::new();
    for r in trials {
        let x = kind.x_value(r);
        groups
            .entry(kind.group_key(r))
            .or_default()
            .entry(r.method.clone())
            .or_default()
            .entry(x.to_bits())
            .or_insert_with(|| (x, Vec::new()))
            .1
            .push(r.metric_value);
    }

    let dir = out_dir
        .map(Path::to_path_buf)
        .unwrap_or_else(|| csv.parent().unwrap_or(Path::new(".")).to_path_buf());
    std::fs::create_dir_all(&dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
    let stem = csv
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "plot".to_string());

    let mut written = Vec::new();
    for (group, series) in &groups {
        let svg = render_group(kind, group, series)?;
        let name = format!("{stem}_{}_{}.svg", kind.id(), sanitize(group));
        let path = dir.join(name);
        std::fs::write(&path, svg)
            .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 {
        "0".to_string()
    } else if !(0.01..10_000.0).contains(&a) {
        format!("{v:.1e}")
    } else if a >= 10.0 {
        format!("{v:.0}")
    } else {
        format!("{v:.3}")
    }
}

struct PointStat {
    x: f64,
    mean: f64,
    std: f64,
}

fn render_group(
    kind: PlotKind,
    group: &str,
    series: &BTreeMap<String, BTreeMap<u64, (f64, Vec<f64>)>>,
) -> Result<String, CliError> {
    // per-method point statistics, sorted in x
    let mut stats: BTreeMap<&String, Vec<PointStat>> = BTreeMap::new();
    for (method, by_x) in series {
        let mut pts: Vec<PointStat> = by_x
            .values()
            .map(|(x, values)| {
                let mean = values.iter().sum::<f64>() / values.len() as f64;
                let std = if values.len() >= 2 {
                    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
                    (ss / (values.len() - 1) as f64).sqrt()
                } else {
                    0.0
                };
                PointStat { x: *x, mean, std }
            })
            .collect();
        pts.sort_by(|a, b| a.x.partial_cmp(&b.x).expect("finite"));
        stats.insert(method, pts);
    }

    let tx = |x: f64| -> f64 {
        if kind.log_x() {
            x.log10()
        } else {
            x
        }
    };
    let mut x_min = f64::INFINITY;
    let mut x_max = f64::NEG_INFINITY;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for pts in stats.values() {
        for p in pts {
            x_min = x_min.min(tx(p.x));
            x_max = x_max.max(tx(p.x));
            y_min = y_min.min(p.mean - p.std);
            y_max = y_max.max(p.mean + p.std);
        }
    }
    if !(x_min.is_finite() && y_min.is_finite()) {
        return Err(CliError::runtime("empty data region in plot group"));
    }
    if x_max - x_min < 1e-12 {
        let pad = x_min.abs().max(1.0) * 0.05;
        x_min -= pad;
        x_max += pad;
    }
    if y_max - y_min < 1e-12 {
        let pad = y_min.abs().max(1.0) * 0.05;
        y_min -= pad;
        y_max += pad;
    }
    let y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    let px = |x: f64| -> f64 {
        MARGIN_L + (tx(x) - x_min) / (x_max - x_min) * (WIDTH - MARGIN_L - MARGIN_R)
    };
    let py = |y: f64| -> f64 {
        HEIGHT - MARGIN_B - (y - y_min) / (y_max - y_min) * (HEIGHT - MARGIN_T - MARGIN_B)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="20" font-family="sans-serif" font-size="14">{} [{}]</text>"#,
        MARGIN_L,
        kind.id(),
        group
    );

    // axes
    let x0 = MARGIN_L;
    let x1 = WIDTH - MARGIN_R;
    let y0 = HEIGHT - MARGIN_B;
    let y1 = MARGIN_T;
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x1:.2}" y2="{y0:.2}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{x0:.2}" y1="{y0:.2}" x2="{x0:.2}" y2="{y1:.2}" stroke="black"/>"#
    );
    // axis ticks: ends plus midpoint, in transformed space
    for frac in [0.0, 0.5, 1.0] {
        let xt = x_min + frac * (x_max - x_min);
        let x_label = if kind.log_x() { 10f64.powf(xt) } else { xt };
        let xp = MARGIN_L + frac * (WIDTH - MARGIN_L - MARGIN_R);
        let _ = writeln!(
            svg,
            r#"<line x1="{xp:.2}" y1="{y0:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/>"#,
            y0 + 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{xp:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
            y0 + 18.0,
            fmt_tick(x_label)
        );
        let yt = y_min + frac * (y_max - y_min);
        let yp = py(yt);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{x0:.2}" y2="{yp:.2}" stroke="black"/>"#,
            x0 - 5.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11" text-anchor="end">{}</text>"#,
            x0 - 8.0,
            yp + 4.0,
            fmt_tick(yt)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
        (x0 + x1) / 2.0,
        HEIGHT - 14.0,
        kind.x_label()
    );

    for (idx, (method, pts)) in stats.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        // band polygon: mean+std forward, mean-std backward
        if pts.len() >= 2 {
            let mut band = String::new();
            for p in pts.iter() {
                let _ = write!(band, "{:.2},{:.2} ", px(p.x), py(p.mean + p.std));
            }
            for p in pts.iter().rev() {
                let _ = write!(band, "{:.2},{:.2} ", px(p.x), py(p.mean - p.std));
            }
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
                band.trim_end()
            );
            let mut line = String::new();
            for p in pts.iter() {
                let _ = write!(line, "{:.2},{:.2} ", px(p.x), py(p.mean));
            }
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                line.trim_end()
            );
        }
        for p in pts.iter() {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#,
                px(p.x),
                py(p.mean)
            );
        }
        // legend entry
        let ly = MARGIN_T + 14.0 * idx as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="10" height="10" fill="{color}"/>"#,
            x1 - 110.0,
            ly
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" font-family="sans-serif" font-size="11">{method}</text>"#,
            x1 - 96.0,
            ly + 9.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}
