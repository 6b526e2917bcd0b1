use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{ExperimentError, Result};
use crate::spec::{SolverKind, SweepKind};
use crate::sweep::{RowStatus, SweepRow};

pub const CSV_HEADER: [&str; 11] = [
    "sweep_value",
    "solver",
    "status",
    "mean_throughput_bps",
    "std_throughput_bps",
    "mean_gain_pct",
    "std_gain_pct",
    "throughput_bps",
    "gain_pct",
    "seeds",
    "note",
];

/// Scientific notation with six significant digits, e.g. `1.32900e8`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.5e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(";")
}

/// Renders the rows as CSV with LF line endings. Per-instance lists are
/// `;`-separated inside one field.
pub fn csv_string(rows: &[SweepRow]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in rows {
        let status = match r.status {
            RowStatus::Ok => "ok",
            RowStatus::Skipped => "skipped",
        };
        w.write_record([
            fmt_num(r.sweep_value),
            r.solver.name().to_string(),
            status.to_string(),
            fmt_opt(r.mean_total_throughput_bps),
            fmt_opt(r.std_total_throughput_bps),
            fmt_opt(r.mean_gain_vs_baseline_pct),
            fmt_opt(r.std_gain_vs_baseline_pct),
            join(&r.throughput_bps, |x| fmt_num(*x)),
            join(&r.gain_pct, |x| fmt_opt(*x)),
            join(&r.seeds, u64::to_string),
            r.note.clone(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(ExperimentError::InvalidSpec("no rows to write".into()));
    }
    fs::write(path, csv_string(rows)).map_err(|e| ExperimentError::io(path, e))
}

const WIDTH: f64 = 760.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const TICKS: usize = 5;

fn colour(solver: SolverKind) -> &'static str {
    match solver {
        SolverKind::Exact => "#1f77b4",
        SolverKind::Heuristic => "#d62728",
        SolverKind::Baseline => "#2ca02c",
    }
}

/// `[lo, hi]` widened by 5% of the span on each side.
fn padded(lo: f64, hi: f64) -> (f64, f64) {
    let span = hi - lo;
    let pad = if span > 0.0 { 0.05 * span } else { 0.05 * lo.abs().max(1.0) };
    (lo - pad, hi + pad)
}

/// Line chart of mean total throughput (Mbps) against the sweep value, one
/// polyline and marker set per solver that has data.
pub fn svg_string(rows: &[SweepRow], kind: SweepKind) -> Result<String> {
    let mut xs: Vec<f64> = rows.iter().map(|r| r.sweep_value).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    if xs.len() < 2 {
        return Err(ExperimentError::DegeneratePlot);
    }

    let mut solvers: Vec<SolverKind> = Vec::new();
    for r in rows {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver);
        }
    }
    let series: Vec<(SolverKind, Vec<(f64, f64)>)> = solvers
        .into_iter()
        .map(|s| {
            let pts = rows
                .iter()
                .filter(|r| r.solver == s)
                .filter_map(|r| r.mean_total_throughput_bps.map(|y| (r.sweep_value, y / 1e6)))
                .collect();
            (s, pts)
        })
        .filter(|(_, pts): &(SolverKind, Vec<(f64, f64)>)| !pts.is_empty())
        .collect();

    let (x0, x1) = padded(xs[0], xs[xs.len() - 1]);
    let ys: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).collect();
    let (y_lo, y_hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &y| (a.min(y), b.max(y)));
    let (y0, y1) = if ys.is_empty() { (0.0, 1.0) } else { padded(y_lo, y_hi) };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let py = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let (bx, by) = (LEFT, TOP + plot_h);
    let _ = writeln!(
        s,
        r#"<g stroke="black"><line x1="{bx:.2}" y1="{by:.2}" x2="{:.2}" y2="{by:.2}"/><line x1="{bx:.2}" y1="{by:.2}" x2="{bx:.2}" y2="{TOP:.2}"/></g>"#,
        LEFT + plot_w
    );
    for i in 0..TICKS {
        let t = i as f64 / (TICKS - 1) as f64;
        let xv = x0 + t * (x1 - x0);
        let yv = y0 + t * (y1 - y0);
        let _ = writeln!(
            s,
            r#"<line x1="{0:.2}" y1="{by:.2}" x2="{0:.2}" y2="{1:.2}" stroke="black"/><text x="{0:.2}" y="{2:.2}" text-anchor="middle">{3:.2}</text>"#,
            px(xv),
            by + 5.0,
            by + 20.0,
            xv
        );
        let _ = writeln!(
            s,
            r#"<line x1="{bx:.2}" y1="{0:.2}" x2="{1:.2}" y2="{0:.2}" stroke="black"/><text x="{2:.2}" y="{3:.2}" text-anchor="end">{4:.2}</text>"#,
            py(yv),
            bx - 5.0,
            bx - 8.0,
            py(yv) + 4.0,
            yv
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        kind.axis_label()
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{0:.2}" text-anchor="middle" transform="rotate(-90 20 {0:.2})">Total throughput (Mbps)</text>"#,
        TOP + plot_h / 2.0
    );

    for (k, (solver, pts)) in series.iter().enumerate() {
        let c = colour(*solver);
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{c}" stroke-width="2" points="{}"/>"#,
            path.join(" ")
        );
        for &(x, y) in pts {
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, px(x), py(y));
        }
        let ly = TOP + 10.0 + 20.0 * k as f64;
        let lx = WIDTH - RIGHT + 20.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{c}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 25.0,
            lx + 32.0,
            ly + 4.0,
            solver.name()
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_plot_svg(rows: &[SweepRow], kind: SweepKind, path: &Path) -> Result<()> {
    let svg = svg_string(rows, kind)?;
    fs::write(path, svg).map_err(|e| ExperimentError::io(path, e))
}
