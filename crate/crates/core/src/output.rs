//! Plot data files.
//!
//! Every table is written twice: a whitespace-separated `.dat` file for
//! gnuplot with `#` header lines, and a `.csv` twin whose header row carries
//! the same column names and units. Files are written to a temporary name
//! and renamed into place, so a reader never sees a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::Result;

/// Unit note placed at the top of every file. The frequency unit `w0` is the
/// one the scenario was written in; presets set `omega_d = 1`.
pub const UNITS_NOTE: &str = "units: hbar = k_B = c_s = 1; frequencies and temperatures in w0 (hbar w0 / k_B), times in 1/w0";

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:.12e}"),
            Cell::Text(s) => s.clone(),
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

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    /// Free-form header lines (`# ` is added in `.dat` files).
    pub notes: Vec<String>,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table { notes: Vec::new(), columns, rows: Vec::new() }
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.notes.push(s.into());
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn headings(&self) -> Vec<String> {
        self.columns
            .iter()
            .map(|c| if c.unit.is_empty() { c.name.to_string() } else { format!("{}[{}]", c.name, c.unit) })
            .collect()
    }

    pub fn to_dat(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# {UNITS_NOTE}");
        for n in &self.notes {
            let _ = writeln!(s, "# {n}");
        }
        let _ = writeln!(s, "# {}", self.headings().join(" "));
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.render().replace(char::is_whitespace, "_")).collect();
            let _ = writeln!(s, "{}", cells.join(" "));
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.headings().iter().map(|h| csv_field(h)).collect::<Vec<_>>().join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.iter().map(|c| csv_field(&c.render())).collect::<Vec<_>>().join(","));
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Write `bytes` to `path` via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Which twins to write.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Formats {
    pub dat: bool,
    pub csv: bool,
}

impl Default for Formats {
    fn default() -> Self {
        Formats { dat: true, csv: true }
    }
}

/// Write `table` as `<stem>.dat` and/or `<stem>.csv`; returns the paths.
pub fn emit_table(dir: &Path, stem: &str, table: &Table, formats: Formats) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    if formats.dat {
        let p = dir.join(format!("{stem}.dat"));
        write_atomic(&p, table.to_dat().as_bytes())?;
        out.push(p);
    }
    if formats.csv {
        let p = dir.join(format!("{stem}.csv"));
        write_atomic(&p, table.to_csv().as_bytes())?;
        out.push(p);
    }
    Ok(out)
}
