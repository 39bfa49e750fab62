//! Artifact rendering and atomic file output.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`. CSV uses `,` separators, a header row and LF line endings.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

/// Shortest round-trip decimal, switching to exponent form for very large
/// or small magnitudes.
pub fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

/// In-memory CSV table.
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            text,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        debug_assert_eq!(cells.len(), self.columns);
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn numeric_row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|v| fmt_num(*v)).collect();
        self.row(&cells);
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s.into_bytes()
}

/// Line plot of several series sharing one x axis.
pub fn svg_plot(title: &str, x: &[f64], series: &[(&str, &[f64])]) -> Vec<u8> {
    const W: f64 = 800.0;
    const H: f64 = 400.0;
    const PAD: f64 = 40.0;
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let (x0, x1) = (x.first().copied().unwrap_or(0.0), x.last().copied().unwrap_or(1.0));
    let ymax = series
        .iter()
        .flat_map(|(_, ys)| ys.iter().copied())
        .filter(|y| y.is_finite())
        .fold(0.0, f64::max);
    let ymax = if ymax > 0.0 { ymax } else { 1.0 };
    let sx = |v: f64| PAD + (v - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - v / ymax * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="24" font-family="sans-serif" font-size="14">{title}</text>"#
    );
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {} H{} M{PAD} {PAD} V{}" stroke="black" fill="none"/>"#,
        H - PAD,
        W - PAD,
        H - PAD
    );
    for (k, (name, ys)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let pts: Vec<String> = x
            .iter()
            .zip(ys.iter())
            .map(|(a, b)| format!("{:.2},{:.2}", sx(*a), sy(*b)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
            pts.join(" ")
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="{color}">{name}</text>"#,
            W - PAD - 150.0,
            PAD + 14.0 * k as f64
        );
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

/// A set of files to be written together.
#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn is_empty(&self) -> bool {
        self.files.is_empty()
    }

    /// Writes every file into `dir`. Each file is written to a temporary in
    /// the same directory and renamed into place, so readers never observe a
    /// partly written artifact; all temporaries are complete before the
    /// first rename.
    pub fn commit(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        let io = |what: &str, e: std::io::Error| CliError::Io(format!("{what} in {}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(|e| io("cannot create output directory", e))?;
        let mut staged = Vec::with_capacity(self.files.len());
        for (name, bytes) in &self.files {
            let mut tmp = NamedTempFile::new_in(dir).map_err(|e| io("cannot create temporary file", e))?;
            tmp.write_all(bytes).map_err(|e| io("cannot write temporary file", e))?;
            tmp.as_file()
                .sync_all()
                .map_err(|e| io("cannot sync temporary file", e))?;
            staged.push((tmp, dir.join(name)));
        }
        let mut written = Vec::with_capacity(staged.len());
        for (tmp, target) in staged {
            tmp.persist(&target)
                .map_err(|e| io("cannot rename artifact", e.error))?;
            written.push(target);
        }
        Ok(written)
    }
}
