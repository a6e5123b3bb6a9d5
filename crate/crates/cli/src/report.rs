use std::fmt::Write as _;

use crate::params::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self, format: Format) -> String {
        match (self, format) {
            (Cell::Int(v), _) => v.to_string(),
            (Cell::Text(s), Format::Csv) if s.contains([',', '"']) => format!("\"{}\"", s.replace('"', "\"\"")),
            (Cell::Text(s), _) => s.clone(),
            (Cell::Real(x), Format::Csv) => format!("{x:.16e}"),
            (Cell::Real(x), Format::Markdown) => markdown_real(*x),
        }
    }
}

/// Integers as-is, otherwise five significant digits (scientific notation for
/// very small or very large magnitudes).
fn markdown_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    if x.fract() == 0.0 && x.abs() < 1e9 {
        return format!("{x:.0}");
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-3..6).contains(&mag) {
        return format!("{x:.4e}");
    }
    let decimals = (4 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// A titled table with optional trailing notes (notes appear in markdown only).
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub title: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(title: impl Into<String>, header: &[&str]) -> Self {
        Self {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.header.join(","));
                out.push('\n');
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.render(format)).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
            }
            Format::Markdown => {
                if !self.title.is_empty() {
                    let _ = writeln!(out, "## {}\n", self.title);
                }
                let _ = writeln!(out, "| {} |", self.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(|c| c.render(format)).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
                if !self.notes.is_empty() {
                    out.push('\n');
                    for n in &self.notes {
                        let _ = writeln!(out, "{n}");
                    }
                }
            }
        }
        out
    }
}
