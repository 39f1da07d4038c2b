//! Minimal deterministic SVG line plots: axes, ticks, one polyline per
//! series, legend. No styling beyond what a quick look at a sweep needs.

use crate::csv_io::CsvTable;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("table needs at least two columns (x plus one series)")]
    TooFewColumns,
    #[error("no drawable points (log scale requires positive values)")]
    NothingToDraw,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlotSpec {
    pub log_y: bool,
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 520.0;
const MARGIN_L: f64 = 70.0;
const MARGIN_R: f64 = 160.0;
const MARGIN_T: f64 = 30.0;
const MARGIN_B: f64 = 50.0;
const PALETTE: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

fn fmt(v: f64) -> String {
    format!("{v:.3}")
}

fn tick_values(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Renders the table to SVG text. Column 0 is the x axis; every other
/// column is one series. Empty cells (and non-positive values under a log
/// axis) are skipped.
pub fn render_plot(table: &CsvTable, spec: PlotSpec) -> Result<String, PlotError> {
    if table.header.len() < 2 {
        return Err(PlotError::TooFewColumns);
    }
    let transform = |v: f64| if spec.log_y { v.log10() } else { v };
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for col in 1..table.header.len() {
        let mut pts = Vec::new();
        for row in &table.rows {
            let (Some(x), Some(y)) = (row[0], row[col]) else { continue };
            if spec.log_y && y <= 0.0 {
                continue;
            }
            pts.push((x, transform(y)));
        }
        series.push((table.header[col].clone(), pts));
    }
    let drawable: Vec<&(String, Vec<(f64, f64)>)> =
        series.iter().filter(|(_, pts)| !pts.is_empty()).collect();
    if drawable.is_empty() {
        return Err(PlotError::NothingToDraw);
    }
    let all_pts = || drawable.iter().flat_map(|(_, pts)| pts.iter());
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all_pts() {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    if y_hi == y_lo {
        y_hi = y_lo + 1.0;
    }
    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_L),
        fmt(MARGIN_T + plot_h),
        fmt(MARGIN_L + plot_w),
        fmt(MARGIN_T + plot_h)
    ));
    out.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        fmt(MARGIN_L),
        fmt(MARGIN_T),
        fmt(MARGIN_L),
        fmt(MARGIN_T + plot_h)
    ));
    // ticks and labels
    for x in tick_values(x_lo, x_hi, 5) {
        let px = sx(x);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
            fmt(px),
            fmt(MARGIN_T + plot_h),
            fmt(MARGIN_T + plot_h + 5.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
            fmt(px),
            fmt(MARGIN_T + plot_h + 18.0),
            fmt(x)
        ));
    }
    for y in tick_values(y_lo, y_hi, 5) {
        let py = sy(y);
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"black\"/>\n",
            fmt(py),
            fmt(MARGIN_L - 5.0),
            fmt(MARGIN_L)
        ));
        let label = if spec.log_y { format!("1e{}", fmt(y)) } else { fmt(y) };
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n",
            fmt(MARGIN_L - 8.0),
            fmt(py + 4.0),
            label
        ));
    }
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
        fmt(MARGIN_L + plot_w / 2.0),
        fmt(HEIGHT - 12.0),
        table.header[0]
    ));
    // series
    for (i, (name, pts)) in drawable.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let coords: Vec<String> =
            pts.iter().map(|&(x, y)| format!("{},{}", fmt(sx(x)), fmt(sy(y)))).collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            coords.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * i as f64 + 10.0;
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            fmt(MARGIN_L + plot_w + 10.0),
            fmt(ly),
            fmt(MARGIN_L + plot_w + 30.0)
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n",
            fmt(MARGIN_L + plot_w + 35.0),
            fmt(ly + 4.0),
            name
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn write_plot(
    table: &CsvTable,
    spec: PlotSpec,
    path: &std::path::Path,
) -> Result<(), PlotError> {
    let text = render_plot(table, spec)?;
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)
            .map_err(|e| PlotError::Io { path: path.display().to_string(), source: e })?;
    }
    std::fs::write(path, text)
        .map_err(|e| PlotError::Io { path: path.display().to_string(), source: e })
}
