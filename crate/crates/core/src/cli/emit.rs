//! Output files.
//!
//! CSV: a `# meta: {json}` comment line, optional further `# key: {json}`
//! lines, a header row, then one row per grid point. Floats are written with
//! 17 significant digits (`{:.16e}`), which round-trips every `f64`.
//!
//! JSON: one object holding the result fields and a `meta` record. Floats
//! use the shortest representation that parses back to the same `f64`.
//!
//! Neither format carries timestamps or host data, so identical runs give
//! identical bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::{Format, Resolved};
use super::CliError;

pub const TOOL: &str = "quenchsim";
pub const PRNG: &str = "ChaCha8 (rand_chacha 0.9), 256-bit key from four SplitMix64 outputs of the seed";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    B(bool),
    Empty,
}

impl Cell {
    fn write(&self, out: &mut String) {
        use std::fmt::Write as _;
        match self {
            Cell::F(x) => write!(out, "{x:.16e}").unwrap(),
            Cell::U(x) => write!(out, "{x}").unwrap(),
            Cell::B(x) => write!(out, "{x}").unwrap(),
            Cell::Empty => {}
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new(columns: &[&'static str]) -> Self {
        CsvTable {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A mode's result in both output shapes.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub table: CsvTable,
    /// Extra `# key: {json}` lines for the CSV form (e.g. a run summary).
    pub comments: Vec<(&'static str, Value)>,
    /// Top-level fields of the JSON form, without `meta`.
    pub body: Map<String, Value>,
}

impl Output {
    pub fn new(table: CsvTable) -> Self {
        Output {
            table,
            comments: Vec::new(),
            body: Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.body.insert(key.to_string(), to_value(value));
        self
    }

    pub fn comment(mut self, key: &'static str, value: impl Serialize) -> Self {
        self.comments.push((key, to_value(value)));
        self
    }
}

pub fn to_value(value: impl Serialize) -> Value {
    serde_json::to_value(value).expect("result types serialize to JSON")
}

pub fn meta(res: &Resolved) -> Value {
    json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "mode": res.mode.name(),
        "seed": res.seed,
        "tail_tol": res.tail_tol,
        "prng": PRNG,
        "config": res.config,
    })
}

pub fn render_csv(meta: &Value, out: &Output) -> String {
    let mut s = format!("# meta: {meta}\n");
    for (key, value) in &out.comments {
        s.push_str(&format!("# {key}: {value}\n"));
    }
    s.push_str(&out.table.columns.join(","));
    s.push('\n');
    for row in &out.table.rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            cell.write(&mut s);
        }
        s.push('\n');
    }
    s
}

pub fn render_json(meta: &Value, out: &Output) -> String {
    let mut obj = out.body.clone();
    obj.insert("meta".into(), meta.clone());
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn render(format: Format, meta: &Value, out: &Output) -> String {
    match format {
        Format::Csv => render_csv(meta, out),
        Format::Json => render_json(meta, out),
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn write_output(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
