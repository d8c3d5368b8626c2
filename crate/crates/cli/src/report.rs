//! Count tables and their CSV, JSON and SVG renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dp4_core::constants::{predicted_count, FieldInvariants};
use dp4_core::geometry::serde_rational;
use dp4_core::surface::{CountMethod, CountResult};
use dp4_core::Rational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CSV_HEADER: &str = "B,count,predicted,ratio,method,elapsed_s";

/// One row of `counts.csv`. `predicted` and `ratio` are absent for `B <= 1`,
/// `elapsed_s` when timing is switched off.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    #[serde(rename = "B", with = "serde_rational")]
    pub bound: Rational,
    pub count: u64,
    pub predicted: Option<f64>,
    pub ratio: Option<f64>,
    pub method: CountMethod,
    pub elapsed_s: Option<f64>,
}

impl CountRow {
    /// Attaches `c B (log B)^(2+2q)` for `field` and the ratio of the count to it.
    pub fn from_result(r: &CountResult, field: &FieldInvariants, timing: bool) -> Result<Self, CliError> {
        let b = r.bound.to_f64().unwrap_or(f64::NAN);
        let predicted = if b > 1.0 {
            Some(predicted_count(field, b).map_err(|e| CliError::Computation(e.to_string()))?)
        } else {
            None
        };
        Ok(Self {
            bound: r.bound.clone(),
            count: r.count,
            ratio: predicted.map(|p| r.count as f64 / p),
            predicted,
            method: r.method,
            elapsed_s: timing.then_some(r.elapsed),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

pub fn counts_to_csv(rows: &[CountRow]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::IoFailure(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::IoFailure(e.to_string()))?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::IoFailure(e.to_string()))?;
    debug_assert!(rows.is_empty() || text.starts_with(CSV_HEADER));
    Ok(text)
}

pub fn counts_from_csv(text: &str) -> Result<Vec<CountRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| CliError::IoFailure(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(CliError::IoFailure(format!("unexpected header {header:?}")));
    }
    r.deserialize().map(|row| row.map_err(|e| CliError::IoFailure(e.to_string()))).collect()
}

/// Pretty JSON with object keys sorted, so output is stable across runs.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    // serde_json's default map is ordered by key.
    let v = serde_json::to_value(value).map_err(|e| CliError::IoFailure(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| CliError::IoFailure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Static line chart of `ratio` against `log B`.
pub fn ratio_svg(points: &[(f64, f64)], title: &str) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{PAD}" y="25" font-family="sans-serif" font-size="14">{title}</text>"#);
    if points.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, 1.0f64, 1.0f64);
    for &(x, y) in points {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    let margin = 0.05 * (y1 - y0).max(1e-3);
    let (y0, y1) = (y0 - margin, y1 + margin);
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        s,
        r#"<line x1="{PAD}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="black"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    let _ = writeln!(s, r#"<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{:.2}" stroke="black"/>"#, H - PAD);
    let _ = writeln!(
        s,
        r##"<line x1="{PAD}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999" stroke-dasharray="4 4"/>"##,
        W - PAD,
        y = sy(1.0)
    );
    let path: Vec<String> = points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
    let _ = writeln!(s, r##"<polyline fill="none" stroke="#1f5fa8" stroke-width="2" points="{}"/>"##, path.join(" "));
    for &(x, y) in points {
        let _ = writeln!(s, r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f5fa8"/>"##, sx(x), sy(y));
    }
    let labels = [(PAD, H - PAD + 20.0, format!("log B = {x0:.2}")), (W - PAD - 90.0, H - PAD + 20.0, format!("log B = {x1:.2}"))];
    for (x, y, t) in labels {
        let _ = writeln!(s, r#"<text x="{x:.2}" y="{y:.2}" font-family="sans-serif" font-size="11">{t}</text>"#);
    }
    let _ = writeln!(
        s,
        r#"<text x="5" y="{:.2}" font-family="sans-serif" font-size="11">{y1:.3}</text>"#,
        PAD + 4.0
    );
    let _ = writeln!(
        s,
        r#"<text x="5" y="{:.2}" font-family="sans-serif" font-size="11">{y0:.3}</text>"#,
        H - PAD
    );
    s.push_str("</svg>\n");
    s
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::IoFailure(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::IoFailure(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Writes `counts.{csv,json,svg}` under `dir`; refuses empty input before touching the disk.
pub fn emit_report(rows: &[CountRow], format: Format, dir: &Path) -> Result<PathBuf, CliError> {
    if rows.is_empty() {
        return Err(CliError::IoFailure("no results to emit".into()));
    }
    match format {
        Format::Csv => write_file(dir, "counts.csv", &counts_to_csv(rows)?),
        Format::Json => write_file(dir, "counts.json", &to_sorted_json(&rows)?),
        Format::Svg => {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter_map(|r| Some((r.bound.to_f64()?.ln(), r.ratio?)))
                .collect();
            write_file(dir, "counts.svg", &ratio_svg(&pts, "count / predicted"))
        }
    }
}

/// Writes a JSON document with a fixed name under `dir`.
pub fn emit_json<T: Serialize>(value: &T, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    write_file(dir, name, &to_sorted_json(value)?)
}

pub fn emit_text(text: &str, dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    write_file(dir, name, text)
}
