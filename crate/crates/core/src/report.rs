//! Run reports and their JSON, CSV and SVG renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Machine-readable outcome of one command. Contains no timings or absolute
/// paths, so equal inputs give byte-identical files.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, serde_json::Value>,
    pub artifacts: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, config_hash: &str, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_hash: config_hash.to_string(),
            seed,
            passed: true,
            checks: Vec::new(),
            metrics: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(Check { name: name.to_string(), passed, detail: detail.into() });
    }

    pub fn metric<T: Serialize>(&mut self, key: &str, value: T) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metrics.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// Rows destined for a CSV file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push<I, S>(&mut self, row: I)
    where
        I: IntoIterator<Item = S>,
        S: ToString,
    {
        self.rows.push(row.into_iter().map(|s| s.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Emit {
    Json,
    Csv,
    Svg,
}

impl FromStr for Emit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "json" => Ok(Emit::Json),
            "csv" => Ok(Emit::Csv),
            "svg" => Ok(Emit::Svg),
            other => Err(format!("unknown format `{other}` (json, csv, svg)")),
        }
    }
}

/// Everything a command can write.
#[derive(Debug, Clone)]
pub struct Outputs {
    pub report: RunReport,
    pub table: Option<Table>,
    pub svg: Option<String>,
}

/// Write the requested formats as `<stem>.json`, `<stem>.csv`, `<stem>.svg`.
/// The report lists the relative file names it ships with.
pub fn emit(out: &mut Outputs, dir: &Path, stem: &str, formats: &[Emit]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut planned: Vec<(Emit, String)> = Vec::new();
    let mut fmts = formats.to_vec();
    fmts.sort();
    fmts.dedup();
    for f in fmts {
        match f {
            Emit::Json => planned.push((f, format!("{stem}.json"))),
            Emit::Csv if out.table.is_some() => planned.push((f, format!("{stem}.csv"))),
            Emit::Svg if out.svg.is_some() => planned.push((f, format!("{stem}.svg"))),
            _ => {}
        }
    }
    out.report.artifacts = planned.iter().map(|(_, n)| n.clone()).collect();
    let mut written = Vec::new();
    for (f, name) in &planned {
        let path = dir.join(name);
        let body = match f {
            Emit::Json => out.report.to_json()?,
            Emit::Csv => out.table.as_ref().expect("planned").to_csv()?,
            Emit::Svg => out.svg.clone().expect("planned"),
        };
        std::fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}

const PALETTE: [&str; 6] = ["#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#17becf"];

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Heat map with one cell per sample, row-major from the bottom-left.
/// `None` marks samples that did not converge.
pub fn heatmap_svg(title: &str, nx: usize, ny: usize, values: &[Option<f64>]) -> String {
    assert_eq!(values.len(), nx * ny);
    let cell = 12usize;
    let (left, top) = (10usize, 30usize);
    let width = left * 2 + nx * cell;
    let height = top + ny * cell + 10;
    let max = values.iter().flatten().cloned().fold(0.0_f64, f64::max).max(1.0);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(s, r#"<text x="{left}" y="18" font-family="sans-serif" font-size="12">{}</text>"#, esc(title));
    for iy in 0..ny {
        for ix in 0..nx {
            let fill = match values[iy * nx + ix] {
                Some(v) => {
                    let shade = (235.0 - 200.0 * (v / max)).round().clamp(0.0, 255.0) as u8;
                    format!("#{shade:02x}{shade:02x}ff")
                }
                None => "#d62728".to_string(),
            };
            let x = left + ix * cell;
            let y = top + (ny - 1 - iy) * cell;
            let _ = writeln!(s, r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="{fill}"/>"#);
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Line plot of several series on shared axes; non-finite points are skipped.
pub fn line_plot_svg(title: &str, x_label: &str, y_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h) = (640.0, 400.0);
    let (l, r, t, b) = (60.0, 20.0, 30.0, 40.0);
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, p)| p.iter().copied())
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = pts.iter().fold(
        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), &(x, y)| (a.min(x), b.max(x), c.min(y), d.max(y)),
    );
    if pts.is_empty() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let sx = |x: f64| l + (x - x0) / (x1 - x0) * (w - l - r);
    let sy = |y: f64| h - b - (y - y0) / (y1 - y0) * (h - t - b);
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#);
    let _ = writeln!(s, r#"<text x="{l}" y="18" font-family="sans-serif" font-size="12">{}</text>"#, esc(title));
    let _ = writeln!(
        s,
        r#"<path d="M{l} {t} L{l} {:.1} L{:.1} {:.1}" stroke="black" fill="none"/>"#,
        h - b,
        w - r,
        h - b
    );
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="11" text-anchor="middle">{}</text>"#,
        (l + w - r) / 2.0,
        h - 8.0,
        esc(x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.1}" font-family="sans-serif" font-size="11" transform="rotate(-90 14 {:.1})" text-anchor="middle">{}</text>"#,
        (t + h - b) / 2.0,
        (t + h - b) / 2.0,
        esc(y_label)
    );
    for (v, anchor_y) in [(y0, h - b), (y1, t)] {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{v:.3}</text>"#,
            l - 4.0,
            anchor_y + 4.0
        );
    }
    for (k, (name, p)) in series.iter().enumerate() {
        let colour = PALETTE[k % PALETTE.len()];
        let coords: Vec<String> = p
            .iter()
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        if !coords.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" stroke="{colour}" fill="none" stroke-width="1.5"/>"#,
                coords.join(" ")
            );
        }
        let ly = t + 14.0 * k as f64 + 10.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" font-family="sans-serif" font-size="11" fill="{colour}" text-anchor="end">{}</text>"#,
            w - r - 4.0,
            esc(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
