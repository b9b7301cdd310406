use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::abc::fmt_real;
use crate::error::{AbcError, Result};

use super::svg::render_svg;
use super::{ExperimentId, ExperimentSpec};

/// Largest tolerated `|ln B₁₂ - ln g - ln B^η|` in an emitted row.
pub const GUARD_TOLERANCE: f64 = 1e-9;

const GUARD_COLUMNS: [&str; 3] = ["log_b12", "log_b_eta", "log_g"];

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
    Text(String),
    /// Missing value, printed as `NA`.
    Na,
}

impl Cell {
    pub fn real_or_na(v: Option<f64>) -> Cell {
        v.map_or(Cell::Na, Cell::Real)
    }

    pub fn as_real(&self) -> Option<f64> {
        match self {
            Cell::Real(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => fmt_real(*v),
            Cell::Text(s) => s.clone(),
            Cell::Na => "NA".to_string(),
        }
    }
}

/// A footer value; `None` prints as `undefined` (e.g. a correlation with a
/// constant sequence).
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub name: String,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotKind {
    Scatter { x: &'static str, y: &'static str },
    /// One panel per group, with a rug mark per row under the bars.
    Histogram { column: &'static str },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotSpec {
    pub title: String,
    pub kind: PlotKind,
    pub x_label: String,
    pub y_label: String,
    /// Column whose values split the points into colored series or panels.
    pub group: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub experiment: ExperimentId,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub metadata: Vec<(String, String)>,
    pub aggregates: Vec<Aggregate>,
    pub plot: Option<PlotSpec>,
}

impl ExperimentReport {
    pub fn new<S: Into<String>>(experiment: ExperimentId, columns: impl IntoIterator<Item = S>) -> Self {
        ExperimentReport {
            experiment,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            metadata: Vec::new(),
            aggregates: Vec::new(),
            plot: None,
        }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn aggregate(&mut self, name: impl Into<String>, value: Option<f64>) {
        self.aggregates.push(Aggregate {
            name: name.into(),
            value,
        });
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Column `name` as reals; non-numeric cells become `None`.
    pub fn reals(&self, name: &str) -> Vec<Option<f64>> {
        match self.column(name) {
            Some(j) => self.rows.iter().map(|r| r[j].as_real()).collect(),
            None => Vec::new(),
        }
    }

    pub fn aggregate_value(&self, name: &str) -> Option<Option<f64>> {
        self.aggregates.iter().find(|a| a.name == name).map(|a| a.value)
    }

    /// Recomputes the factorization residual of every row carrying the
    /// three log columns.
    pub fn check_guards(&self) -> Result<()> {
        let idx: Vec<usize> = GUARD_COLUMNS.iter().filter_map(|c| self.column(c)).collect();
        if idx.len() != GUARD_COLUMNS.len() {
            return Ok(());
        }
        for (i, row) in self.rows.iter().enumerate() {
            let v: Vec<Option<f64>> = idx.iter().map(|&j| row[j].as_real()).collect();
            let (Some(b12), Some(eta), Some(g)) = (v[0], v[1], v[2]) else {
                return Err(AbcError::Guard(format!(
                    "guard=factorization-identity experiment={} row={i} residual=missing",
                    self.experiment
                )));
            };
            let residual = b12 - g - eta;
            if !(residual.abs() < GUARD_TOLERANCE) {
                return Err(AbcError::Guard(format!(
                    "guard=factorization-identity experiment={} row={i} residual={residual:e}",
                    self.experiment
                )));
            }
        }
        Ok(())
    }

    /// Header, one record per row, then `# key=value` footer lines for the
    /// metadata and aggregates. Fails before writing anything if a guard
    /// does not hold.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        self.check_guards()?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        let mut out = writer.into_inner().map_err(|e| AbcError::io("<report>", e.into_error()))?;
        let footer = |out: &mut W| -> std::io::Result<()> {
            for (k, v) in &self.metadata {
                writeln!(out, "# {k}={v}")?;
            }
            for a in &self.aggregates {
                match a.value {
                    Some(v) => writeln!(out, "# {}={}", a.name, fmt_real(v))?,
                    None => writeln!(out, "# {}=undefined", a.name)?,
                }
            }
            Ok(())
        };
        footer(&mut out).map_err(|e| AbcError::io("<report>", e))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }
}

/// Writes `<out>/<experiment>.csv` and, when plotting, `<experiment>.svg`.
/// Returns the paths written.
pub fn emit_outputs(report: &ExperimentReport, spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let csv_text = report.to_csv_string()?;
    fs::create_dir_all(&spec.out_dir).map_err(|e| AbcError::io(&spec.out_dir, e))?;
    let csv_path = spec.out_dir.join(format!("{}.csv", report.experiment));
    fs::write(&csv_path, csv_text).map_err(|e| AbcError::io(&csv_path, e))?;
    let mut written = vec![csv_path];
    if spec.plot {
        let svg_path = spec.out_dir.join(format!("{}.svg", report.experiment));
        fs::write(&svg_path, render_svg(report)).map_err(|e| AbcError::io(&svg_path, e))?;
        written.push(svg_path);
    }
    Ok(written)
}
