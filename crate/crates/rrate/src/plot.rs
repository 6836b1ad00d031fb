//! Figure emitters: run timeplots, recurrence rasters, and counter-series
//! overlays. All emitters are pure functions of their inputs — no clocks, no
//! randomness — so identical inputs yield byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::bbv::{to_unit_max, DistanceMatrix};
use crate::error::{Error, Result};
use crate::exec::RunLog;
use crate::perf::AlignedSeries;

pub const TIMEPLOT_TAG: &str = "rrate-timeplot/1";
pub const RECURRENCE_TAG: &str = "rrate-recurrence/1";
pub const OVERLAY_TAG: &str = "rrate-overlay/1";

const PALETTE: [&str; 12] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
    "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#86bcb6", "#d37295",
];

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in s.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Stable color for a benchmark id: same id, same color, in every plot.
pub fn palette_color(bench_id: &str) -> &'static str {
    PALETTE[(fnv1a(bench_id) % PALETTE.len() as u64) as usize]
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a run log as an SVG timeline: wall seconds on x, one row per
/// copy, one rectangle per event, colored by benchmark.
pub fn timeplot_svg(log: &RunLog) -> Result<String> {
    if log.events.is_empty() {
        return Err(Error::Metric("cannot plot an empty run log".into()));
    }
    let t0 = log.events.iter().map(|e| e.start_ns).min().unwrap();
    let t1 = log.events.iter().map(|e| e.end_ns).max().unwrap();
    let span_ns = (t1 - t0).max(1) as f64;
    let span_s = span_ns / 1e9;

    let ml = 70.0;
    let mt = 36.0;
    let row_h = 22.0;
    let row_gap = 4.0;
    let plot_w = 820.0;
    let legend_w = 170.0;
    let copies = log.copies.max(1) as f64;
    let plot_h = copies * (row_h + row_gap) - row_gap;

    let mut legend_ids: Vec<&str> = log.roster.iter().map(String::as_str).collect();
    if legend_ids.is_empty() {
        let mut ids: Vec<&str> = log.events.iter().map(|e| e.bench_id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        legend_ids = ids;
    }

    let width = ml + plot_w + legend_w + 20.0;
    let height = mt + plot_h + 46.0;
    let x_of = |ns: u64| ml + (ns - t0) as f64 / span_ns * plot_w;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(svg, "<!-- format: {TIMEPLOT_TAG} -->");
    let _ = writeln!(
        svg,
        "<text x=\"{ml}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\">{} — {} mode, {} copies, span {:.3} s</text>",
        xml_escape(&log.suite_name),
        log.mode,
        log.copies,
        span_s
    );

    for copy in 0..log.copies {
        let y = mt + copy as f64 * (row_h + row_gap);
        let _ = writeln!(
            svg,
            "<text x=\"8\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">copy {copy}</text>",
            y + row_h / 2.0 + 4.0
        );
    }

    for e in &log.events {
        let x = x_of(e.start_ns);
        let w = (e.end_ns - e.start_ns) as f64 / span_ns * plot_w;
        let y = mt + e.copy as f64 * (row_h + row_gap);
        let color = palette_color(&e.bench_id);
        let stroke = if e.exit_ok { "none" } else { "#000000" };
        let _ = writeln!(
            svg,
            "<rect x=\"{x:.3}\" y=\"{y:.1}\" width=\"{w:.3}\" height=\"{row_h:.1}\" fill=\"{color}\" stroke=\"{stroke}\"><title>{} {} i{} ({:.4} s)</title></rect>",
            xml_escape(&e.bench_id),
            xml_escape(&e.workload),
            e.iteration,
            e.duration_s()
        );
    }

    // x axis: start, middle, end in seconds
    let ax_y = mt + plot_h + 16.0;
    for (frac, label) in [(0.0, 0.0), (0.5, span_s / 2.0), (1.0, span_s)] {
        let x = ml + frac * plot_w;
        let _ = writeln!(
            svg,
            "<text x=\"{x:.1}\" y=\"{ax_y:.1}\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"middle\">{label:.2}s</text>"
        );
    }

    let lx = ml + plot_w + 16.0;
    for (k, id) in legend_ids.iter().enumerate() {
        let y = mt + k as f64 * 18.0;
        let _ = writeln!(
            svg,
            "<rect x=\"{lx:.1}\" y=\"{y:.1}\" width=\"12\" height=\"12\" fill=\"{}\"/>",
            palette_color(id)
        );
        let _ = writeln!(
            svg,
            "<text x=\"{:.1}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>",
            lx + 16.0,
            y + 10.0,
            xml_escape(id)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_timeplot_svg(log: &RunLog, out: &Path) -> Result<()> {
    let svg = timeplot_svg(log)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out, e))
}

/// Grayscale raster of a distance matrix: identical intervals render
/// brightest. Pixel (i, j) = round(255 * (1 - D_unitmax[i][j])); indices are
/// matrix coordinates with interval (0,0) at the lower left when written out.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceImage {
    pub dim: usize,
    pixels: Vec<u8>,
}

impl RecurrenceImage {
    pub fn pixel(&self, i: usize, j: usize) -> u8 {
        self.pixels[i * self.dim + j]
    }
}

pub fn recurrence_image(d: &DistanceMatrix) -> RecurrenceImage {
    let u = to_unit_max(d);
    let dim = u.dim;
    let mut pixels = vec![0u8; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            pixels[i * dim + j] = (255.0 * (1.0 - u.get(i, j))).round() as u8;
        }
    }
    RecurrenceImage { dim, pixels }
}

/// Binary 8-bit PGM (P5) with interval (0,0) at the lower-left corner, so
/// raster row 0 holds matrix row dim-1.
pub fn recurrence_pgm(img: &RecurrenceImage) -> Vec<u8> {
    let mut out = Vec::with_capacity(img.dim * img.dim + 64);
    out.extend_from_slice(format!("P5\n# {RECURRENCE_TAG}\n{} {}\n255\n", img.dim, img.dim).as_bytes());
    for i in (0..img.dim).rev() {
        for j in 0..img.dim {
            out.push(img.pixel(i, j));
        }
    }
    out
}

/// SVG wrapper around the same raster, one run-length-encoded row of rects
/// per raster line.
pub fn recurrence_svg(img: &RecurrenceImage) -> String {
    let dim = img.dim;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{dim}\" height=\"{dim}\" viewBox=\"0 0 {dim} {dim}\" shape-rendering=\"crispEdges\">"
    );
    let _ = writeln!(svg, "<!-- format: {RECURRENCE_TAG} -->");
    for (row, i) in (0..dim).rev().enumerate() {
        let mut j = 0;
        while j < dim {
            let v = img.pixel(i, j);
            let mut run = 1;
            while j + run < dim && img.pixel(i, j + run) == v {
                run += 1;
            }
            let _ = writeln!(
                svg,
                "<rect x=\"{j}\" y=\"{row}\" width=\"{run}\" height=\"1\" fill=\"rgb({v},{v},{v})\"/>"
            );
            j += run;
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_recurrence_pgm(d: &DistanceMatrix, out: &Path) -> Result<()> {
    std::fs::write(out, recurrence_pgm(&recurrence_image(d))).map_err(|e| Error::io(out, e))
}

pub fn write_recurrence_svg(d: &DistanceMatrix, out: &Path) -> Result<()> {
    std::fs::write(out, recurrence_svg(&recurrence_image(d))).map_err(|e| Error::io(out, e))
}

fn polyline(points: &[(f64, f64)], color: &str) -> String {
    let mut coords = String::new();
    for (x, y) in points {
        let _ = write!(coords, "{x:.2},{y:.2} ");
    }
    format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\"/>\n",
        coords.trim_end()
    )
}

/// Stacked panels on a shared instruction axis: the recurrence raster (when
/// a matrix is given) above line plots of IPC, frontend-bound and
/// backend-bound fractions.
pub fn perf_overlay_svg(series: &AlignedSeries, matrix: Option<&DistanceMatrix>) -> Result<String> {
    if series.is_empty() {
        return Err(Error::Metric("cannot plot an empty series".into()));
    }
    if let Some(m) = matrix {
        if m.dim != series.len() {
            return Err(Error::Metric(format!(
                "interval count mismatch: recurrence matrix has {} intervals, series has {}",
                m.dim,
                series.len()
            )));
        }
    }
    let n = series.len();
    let ml = 60.0;
    let plot_w: f64 = 760.0;
    let raster_h = if matrix.is_some() { plot_w.min(360.0) } else { 0.0 };
    let panel_h = 120.0;
    let gap = 34.0;
    let mt = 30.0;
    let has_fracs = series.has_topdown();
    let panels = 1 + if has_fracs { 1 } else { 0 };
    let height = mt + raster_h + (panel_h + gap) * panels as f64 + 30.0;
    let width = ml + plot_w + 30.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(svg, "<!-- format: {OVERLAY_TAG} -->");
    let total_instructions = series.interval_instructions.saturating_mul(n as u64);
    let _ = writeln!(
        svg,
        "<text x=\"{ml}\" y=\"20\" font-family=\"sans-serif\" font-size=\"13\">{n} intervals x {} instructions = {} instructions</text>",
        series.interval_instructions, total_instructions
    );

    let mut y_cursor = mt;
    if let Some(m) = matrix {
        let img = recurrence_image(m);
        let cell = raster_h / n as f64;
        for (row, i) in (0..n).rev().enumerate() {
            let mut j = 0;
            while j < n {
                let v = img.pixel(i, j);
                let mut run = 1;
                while j + run < n && img.pixel(i, j + run) == v {
                    run += 1;
                }
                let _ = writeln!(
                    svg,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"rgb({v},{v},{v})\"/>",
                    ml + j as f64 * cell,
                    y_cursor + row as f64 * cell,
                    run as f64 * cell,
                    cell + 0.05
                );
                j += run;
            }
        }
        y_cursor += raster_h + gap;
    }

    let x_of = |k: usize| ml + (k as f64 + 0.5) / n as f64 * plot_w;

    // IPC panel
    let ipc_max = series
        .points
        .iter()
        .map(|p| p.ipc)
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let pts: Vec<(f64, f64)> = series
        .points
        .iter()
        .enumerate()
        .map(|(k, p)| (x_of(k), y_cursor + panel_h - p.ipc / ipc_max * panel_h))
        .collect();
    let _ = writeln!(
        svg,
        "<text x=\"8\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">ipc (max {ipc_max:.2})</text>",
        y_cursor + 12.0
    );
    let _ = writeln!(
        svg,
        "<rect x=\"{ml}\" y=\"{y_cursor:.1}\" width=\"{plot_w}\" height=\"{panel_h}\" fill=\"none\" stroke=\"#cccccc\"/>"
    );
    svg.push_str(&polyline(&pts, "#1f77b4"));
    y_cursor += panel_h + gap;

    if has_fracs {
        let _ = writeln!(
            svg,
            "<text x=\"8\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\">frontend (green) / backend (red), 0..1</text>",
            y_cursor + 12.0
        );
        let _ = writeln!(
            svg,
            "<rect x=\"{ml}\" y=\"{y_cursor:.1}\" width=\"{plot_w}\" height=\"{panel_h}\" fill=\"none\" stroke=\"#cccccc\"/>"
        );
        let frac_pts = |f: &dyn Fn(&crate::perf::TopDownFractions) -> f64| -> Vec<(f64, f64)> {
            series
                .points
                .iter()
                .enumerate()
                .map(|(k, p)| {
                    let v = p.fractions.as_ref().map_or(0.0, f).clamp(0.0, 1.0);
                    (x_of(k), y_cursor + panel_h - v * panel_h)
                })
                .collect()
        };
        svg.push_str(&polyline(&frac_pts(&|f| f.frontend), "#2ca02c"));
        svg.push_str(&polyline(&frac_pts(&|f| f.backend), "#d62728"));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn write_perf_overlay_svg(
    series: &AlignedSeries,
    matrix: Option<&DistanceMatrix>,
    out: &Path,
) -> Result<()> {
    let svg = perf_overlay_svg(series, matrix)?;
    std::fs::write(out, svg).map_err(|e| Error::io(out, e))
}
