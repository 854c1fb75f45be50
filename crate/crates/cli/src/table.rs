use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => json!(i),
            Cell::Real(x) if x.is_finite() => json!(x),
            Cell::Real(x) => json!(x.to_string()),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// Builds a row from heterogeneous values.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::table::Cell::from($x)),*] };
}

/// Header lines identifying where a table came from.
#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub version: String,
    pub generated: String,
}

impl Provenance {
    pub fn new(config_sha256: String) -> Self {
        Self {
            config_sha256,
            version: env!("CARGO_PKG_VERSION").to_string(),
            generated: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ResultTable {
    /// Empty for the primary table of an experiment.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width of table {:?}", self.name);
        self.rows.push(row);
    }

    pub fn paths(&self, stem: &Path) -> (PathBuf, PathBuf) {
        let base = if self.name.is_empty() {
            stem.as_os_str().to_owned()
        } else {
            let mut s = stem.as_os_str().to_owned();
            s.push(format!(".{}", self.name));
            s
        };
        let mut csv = base.clone();
        csv.push(".csv");
        let mut js = base;
        js.push(".json");
        (PathBuf::from(csv), PathBuf::from(js))
    }

    pub fn to_csv(&self, prov: &Provenance) -> CliResult<String> {
        let mut out = format!(
            "# config_sha256: {}\n# version: blindspin {}\n# generated: {}\n",
            prov.config_sha256, prov.version, prov.generated
        );
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Output(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self, prov: &Provenance) -> Value {
        json!({
            "provenance": prov,
            "columns": self.columns,
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write(&self, stem: &Path, prov: &Provenance) -> CliResult<Vec<PathBuf>> {
        let (csv_path, json_path) = self.paths(stem);
        fs::write(&csv_path, self.to_csv(prov)?)?;
        fs::write(&json_path, serde_json::to_string_pretty(&self.to_json(prov))?)?;
        Ok(vec![csv_path, json_path])
    }
}

/// Axes and series of a figure, for an external plotting tool.
#[derive(Clone, Debug, Serialize)]
pub struct PlotDescriptor {
    pub title: String,
    pub table: String,
    pub kind: String,
    pub x: Axis,
    pub y: Axis,
    /// Columns whose distinct values split the rows into series.
    pub series_by: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Axis {
    pub column: String,
    pub label: String,
    pub scale: String,
}

impl Axis {
    pub fn linear(column: &str, label: &str) -> Self {
        Self { column: column.into(), label: label.into(), scale: "linear".into() }
    }

    pub fn log(column: &str, label: &str) -> Self {
        Self { column: column.into(), label: label.into(), scale: "log".into() }
    }
}
