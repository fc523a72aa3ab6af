//! Sensitivity/specificity time series as CSV and minimal SVG line charts.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::EvalRecord;

pub const CSV_HEADER: &str = "t,iteration,sensitivity,specificity";

const W: f64 = 640.0;
const H: f64 = 360.0;
const PAD: f64 = 48.0;

#[derive(Clone, Debug, PartialEq)]
pub struct TimeSeries {
    pub csv: String,
    pub sensitivity_svg: String,
    pub specificity_svg: String,
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// CSV plus one chart per metric. Undefined values become empty cells and gaps in the line.
pub fn emit_timeseries(records: &[EvalRecord]) -> Result<TimeSeries> {
    if records.is_empty() {
        return Err(Error::InvalidInput("empty run log".into()));
    }
    if let Some(w) = records.windows(2).find(|w| w[1].t < w[0].t) {
        return Err(Error::InvalidInput(format!(
            "time column decreases at iteration {} ({} < {})",
            w[1].iteration, w[1].t, w[0].t
        )));
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in records {
        let _ = writeln!(
            csv,
            "{:.3},{},{},{}",
            r.t,
            r.iteration,
            cell(r.sensitivity),
            cell(r.specificity)
        );
    }
    Ok(TimeSeries {
        csv,
        sensitivity_svg: chart(records, "sensitivity", |r| r.sensitivity),
        specificity_svg: chart(records, "specificity", |r| r.specificity),
    })
}

/// Writes `{stem}.csv`, `{stem}_sensitivity.svg` and `{stem}_specificity.svg` into `dir`.
pub fn write_timeseries(records: &[EvalRecord], dir: &Path, stem: &str) -> Result<()> {
    let ts = emit_timeseries(records)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{stem}.csv")), ts.csv)?;
    fs::write(dir.join(format!("{stem}_sensitivity.svg")), ts.sensitivity_svg)?;
    fs::write(dir.join(format!("{stem}_specificity.svg")), ts.specificity_svg)?;
    Ok(())
}

fn chart(records: &[EvalRecord], name: &str, metric: impl Fn(&EvalRecord) -> Option<f64>) -> String {
    let t_max = records.last().map_or(0.0, |r| r.t).max(f64::MIN_POSITIVE);
    let x = |t: f64| PAD + (W - 2.0 * PAD) * t / t_max;
    let y = |v: f64| H - PAD - (H - 2.0 * PAD) * v;

    // Contiguous runs of defined values; each run is its own polyline.
    let mut runs: Vec<Vec<(f64, f64)>> = vec![Vec::new()];
    for r in records {
        match metric(r) {
            Some(v) => runs.last_mut().expect("non-empty").push((x(r.t), y(v))),
            None if !runs.last().expect("non-empty").is_empty() => runs.push(Vec::new()),
            None => {}
        }
    }

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let (x0, x1, y0, y1) = (PAD, W - PAD, y(0.0), y(1.0));
    let _ = writeln!(
        s,
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>"#
    );
    for v in [0.0, 0.5, 1.0] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="end">{v:.1}</text>"#,
            x0 - 6.0,
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="11" text-anchor="middle">t (s), last = {t_max:.1}</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="20" font-size="13" text-anchor="middle">{name}</text>"#,
        W / 2.0
    );
    for run in runs.iter().filter(|r| !r.is_empty()) {
        let pts: Vec<String> = run.iter().map(|(a, b)| format!("{a:.2},{b:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
            pts.join(" ")
        );
    }
    s.push_str("</svg>\n");
    s
}
