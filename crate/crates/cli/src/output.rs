//! Deterministic table output: a provenance comment line, a column header and
//! rows of shortest round-trip floats, all `\n`-terminated.

use std::fmt::Write as _;

use serde_json::{Map, Value};

pub const TOOL_NAME: &str = "plaquette-qgauge";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Effective configuration, serialized with sorted keys.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig(Map<String, Value>);

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut map = Map::new();
        map.insert("command".into(), Value::from(command));
        Self(map)
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&self.0).expect("string-keyed map always serializes")
    }

    /// `# plaquette-qgauge v<semver> config=<json>`
    pub fn header_line(&self) -> String {
        format!("# {TOOL_NAME} v{VERSION} config={}", self.canonical_json())
    }
}

/// Shortest round-trip decimal; `NaN`/`inf`/`-inf` for non-finite values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        ryu::Buffer::new().format_finite(v).to_owned()
    } else if v.is_nan() {
        "NaN".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| match r[i] {
                    Cell::Float(v) => v,
                    Cell::Int(v) => v as f64,
                })
                .collect(),
        )
    }

    pub fn to_csv(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        out.push_str(&config.header_line());
        out.push('\n');
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match cell {
                    Cell::Float(v) => out.push_str(&fmt_f64(*v)),
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                }
            }
            out.push('\n');
        }
        out
    }
}
