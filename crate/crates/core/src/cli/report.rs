use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;

use super::config::OutFormat;

/// Bumped whenever a table layout changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.11e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    /// Short form for the terminal.
    pub fn brief(&self) -> String {
        match self {
            Cell::Num(x) => format!("{x:.6e}"),
            other => other.csv(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in table {}", self.name);
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# sobolev-stab {} v{SCHEMA_VERSION}\n{}\n", self.name, self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// A pass/fail verdict tied to one numbered acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: u32,
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn line(&self) -> String {
        format!("{} [{}] {}: {}", if self.pass { "PASS" } else { "FAIL" }, self.criterion, self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// A log-log line plot.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Plot {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub n: usize,
    pub p: f64,
    pub schema: u32,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub plots: Vec<Plot>,
}

impl Report {
    pub fn new(command: &str, n: usize, p: f64) -> Self {
        Report { command: command.into(), n, p, schema: SCHEMA_VERSION, tables: vec![], checks: vec![], plots: vec![] }
    }

    pub fn check(&mut self, criterion: u32, name: &str, pass: bool, detail: String) {
        self.checks.push(Check { criterion, name: name.into(), pass, detail });
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn checks_table(&self) -> Table {
        let mut t = Table::new("checks", &["criterion", "name", "verdict", "detail"]);
        for c in &self.checks {
            t.push(vec![
                (c.criterion as usize).into(),
                c.name.as_str().into(),
                if c.pass { "PASS" } else { "FAIL" }.into(),
                c.detail.as_str().into(),
            ]);
        }
        t
    }

    /// Writes the report under `dir` and returns the files written, in order.
    pub fn write(&self, dir: &Path, format: OutFormat, plot: bool) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        match format {
            OutFormat::Csv => {
                for t in self.tables.iter().chain(std::iter::once(&self.checks_table())) {
                    let path = dir.join(format!("{}_{}.csv", self.command, t.name));
                    fs::write(&path, t.to_csv())?;
                    written.push(path);
                }
            }
            OutFormat::Json => {
                let path = dir.join(format!("{}.json", self.command));
                let mut text = serde_json::to_string_pretty(self).map_err(|e| crate::Error::Io(e.to_string()))?;
                text.push('\n');
                fs::write(&path, text)?;
                written.push(path);
            }
        }
        if plot {
            for pl in &self.plots {
                let path = dir.join(format!("{}_{}.svg", self.command, pl.name));
                fs::write(&path, svg(pl))?;
                written.push(path);
            }
        }
        Ok(written)
    }

    /// Human-readable summary for the terminal.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for t in &self.tables {
            let _ = writeln!(out, "== {} ({} rows)", t.name, t.rows.len());
            let _ = writeln!(out, "{}", t.columns.join("  "));
            for row in t.rows.iter().take(40) {
                let cells: Vec<String> = row.iter().map(Cell::brief).collect();
                let _ = writeln!(out, "{}", cells.join("  "));
            }
            if t.rows.len() > 40 {
                let _ = writeln!(out, "... {} more", t.rows.len() - 40);
            }
        }
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.line());
        }
        out
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// Log-log polylines; points with a non-positive coordinate are dropped.
pub fn svg(plot: &Plot) -> String {
    let (w, h, m) = (640.0, 420.0, 60.0);
    let pts: Vec<(f64, f64)> = plot
        .series
        .iter()
        .flat_map(|s| s.points.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    );
    let _ = writeln!(out, "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>");
    if pts.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let fold = |f: fn(f64, f64) -> f64, init: f64, sel: fn(&(f64, f64)) -> f64| pts.iter().map(sel).fold(init, f);
    let (x0, x1) = (fold(f64::min, f64::INFINITY, |p| p.0).floor(), fold(f64::max, f64::NEG_INFINITY, |p| p.0).ceil());
    let (y0, y1) = (fold(f64::min, f64::INFINITY, |p| p.1).floor(), fold(f64::max, f64::NEG_INFINITY, |p| p.1).ceil());
    let (xs, ys) = ((x1 - x0).max(1.0), (y1 - y0).max(1.0));
    let px = |x: f64| m + (w - 2.0 * m) * (x - x0) / xs;
    let py = |y: f64| h - m - (h - 2.0 * m) * (y - y0) / ys;
    let _ = writeln!(
        out,
        "<rect x=\"{m}\" y=\"{m}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>",
        w - 2.0 * m,
        h - 2.0 * m
    );
    for k in 0..=(xs as i64) {
        let x = x0 + k as f64;
        let _ = writeln!(out, "<text x=\"{:.1}\" y=\"{}\" text-anchor=\"middle\">1e{}</text>", px(x), h - m + 16.0, x);
    }
    for k in 0..=(ys as i64) {
        let y = y0 + k as f64;
        let _ = writeln!(out, "<text x=\"{}\" y=\"{:.1}\" text-anchor=\"end\">1e{}</text>", m - 6.0, py(y) + 4.0, y);
    }
    let _ = writeln!(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>", w / 2.0, h - 12.0, plot.x_label);
    let _ = writeln!(
        out,
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
        h / 2.0,
        h / 2.0,
        plot.y_label
    );
    for (i, s) in plot.series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let line: Vec<String> = s
            .points
            .iter()
            .filter(|&&(x, y)| x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x.log10()), py(y.log10())))
            .collect();
        let _ = writeln!(out, "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>", line.join(" "));
        let _ = writeln!(
            out,
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\">{}</text>",
            w - m - 150.0,
            m + 16.0 * (i as f64 + 1.0),
            s.label
        );
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells() {
        assert_eq!(Cell::Num(1.0).csv(), "1.00000000000e0");
        assert_eq!(Cell::Num(-2.5e-7).csv(), "-2.50000000000e-7");
        assert_eq!(Cell::from("a,b").csv(), "\"a,b\"");
        assert_eq!(Cell::from(3usize).csv(), "3");
    }

    #[test]
    fn table_has_versioned_header() {
        let mut t = Table::new("demo", &["x", "y"]);
        t.push(vec![1usize.into(), 0.5.into()]);
        let text = t.to_csv();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines, vec!["# sobolev-stab demo v1", "x,y", "1,5.00000000000e-1"]);
    }

    #[test]
    fn svg_is_well_formed() {
        let plot = Plot {
            name: "demo".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            series: vec![Series { label: "s".into(), points: vec![(1.0, 1.0), (10.0, 100.0), (0.0, 1.0)] }],
        };
        let text = svg(&plot);
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("<polyline").count(), 1);
    }
}
