//! Rendering helpers: exact-plus-decimal values, CSV text, output files and
//! their manifests.

use std::io::Write;
use std::path::{Path, PathBuf};

use diophant::arith::rational::{self, Rational};
use diophant::arith::Interval;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

#[derive(Clone, Copy, Debug)]
pub struct Fmt {
    pub digits: u32,
}

impl Fmt {
    pub fn dec(&self, x: &Rational) -> String {
        rational::to_decimal(x, self.digits)
    }

    pub fn q(&self, x: &Rational) -> Value {
        json!({ "exact": x.to_string(), "decimal": self.dec(x) })
    }

    pub fn iv(&self, x: &Interval) -> Value {
        json!({ "lo": self.q(x.lo()), "hi": self.q(x.hi()) })
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// CSV table whose numeric columns hold exact rationals, each followed by a
/// `_dec` column with its decimal rendering.
pub struct Csv {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    fn field(s: &str) -> String {
        if s.contains([',', '"', '\n']) {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line.iter().map(|c| Self::field(c)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Column names `names` followed by `names_dec`.
pub fn exact_and_dec(names: &[&str]) -> Vec<String> {
    names
        .iter()
        .map(|s| s.to_string())
        .chain(names.iter().map(|s| format!("{s}_dec")))
        .collect()
}

/// Row cells for [`exact_and_dec`] columns; `None` renders as empty cells.
pub fn exact_and_dec_cells(fmt: Fmt, values: &[Option<&Rational>]) -> Vec<String> {
    let exact = values.iter().map(|v| v.map(ToString::to_string).unwrap_or_default());
    let dec = values.iter().map(|v| v.map(|x| fmt.dec(x)).unwrap_or_default());
    exact.chain(dec).collect()
}

/// Description of one input, embedded in the manifest with enough content
/// to reproduce the run.
#[derive(Clone, Debug)]
pub struct InputRecord {
    pub role: String,
    pub spec: String,
    pub sha256: Option<String>,
    pub content: Value,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    out.with_file_name(name)
}

/// Writes `text` to `out` (or standard output) and, for file output, the
/// manifest next to it.
pub fn emit(out: Option<&Path>, text: &str, manifest: Value) -> Result<(), Failure> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(Failure::other)?;
        }
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            let mut m = manifest;
            m["output"] = json!({ "path": path.display().to_string(), "sha256": sha256_hex(text.as_bytes()) });
            let body = serde_json::to_string_pretty(&m).map_err(Failure::other)? + "\n";
            std::fs::write(manifest_path(path), body).map_err(Failure::other)?;
        }
    }
    Ok(())
}
