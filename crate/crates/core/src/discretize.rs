//! Turning a plot × variable table into a transaction database.
//!
//! Continuous variables are cut into bins ([`BinScheme`]), every bin and
//! every categorical level becomes a boolean item, and each plot becomes one
//! [`Transaction`] holding its present species plus exactly one item per
//! variable.
//!
//! Bins are half-open `[lo, hi)` except the last, which is closed, so a set of
//! edges always partitions `[first, last]`.

use std::collections::HashSet;
use std::fmt;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ItemCatalog, ItemClass, ModelError, Transaction, TransactionDb};

#[derive(Debug, Error)]
pub enum DiscretizeError {
    #[error("cannot compute bins from an empty value list")]
    EmptyValues,
    #[error("bin width must be positive and finite, got {0}")]
    InvalidWidth(f64),
    #[error("bin count must be at least 2, got {0}")]
    InvalidBinCount(usize),
    #[error("expected class count must be at least 1")]
    InvalidExpectedClasses,
    #[error("non-finite value {0} cannot be binned")]
    NonFinite(f64),
    #[error("value {value} of variable {variable:?} lies outside [{lo}, {hi}]")]
    OutOfRange {
        variable: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("variable {0:?} is not a column of the input table")]
    UnknownVariable(String),
    #[error("duplicate plot id {0:?}")]
    DuplicatePlot(String),
    #[error("plot {plot:?}: cannot read {value:?} in species column {column} as presence/absence")]
    BadPresence {
        plot: String,
        column: String,
        value: String,
    },
    #[error("variable {0:?} is binned but was not loaded as numeric")]
    NotNumeric(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = DiscretizeError> = std::result::Result<T, E>;

/// How a variable is turned into items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BinScheme {
    /// Bins of a fixed width anchored at multiples of the width.
    /// `expected_classes` is informational and only audited.
    FixedWidth { width: f64, expected_classes: usize },
    /// Quantile bins at `k / n_bins`.
    Percentile { n_bins: usize },
    /// `n_bins` equal-width bins spanning exactly `[min, max]`.
    EvenRange { n_bins: usize },
    /// Already categorical; each distinct level is one item.
    Categorical,
}

impl BinScheme {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BinScheme::FixedWidth {
                width,
                expected_classes,
            } => {
                if !(width.is_finite() && width > 0.0) {
                    return Err(DiscretizeError::InvalidWidth(width));
                }
                if expected_classes < 1 {
                    return Err(DiscretizeError::InvalidExpectedClasses);
                }
            }
            BinScheme::Percentile { n_bins } | BinScheme::EvenRange { n_bins } => {
                if n_bins < 2 {
                    return Err(DiscretizeError::InvalidBinCount(n_bins));
                }
            }
            BinScheme::Categorical => {}
        }
        Ok(())
    }

    /// The class count the scheme nominally produces, if it states one.
    pub fn expected_classes(&self) -> Option<usize> {
        match *self {
            BinScheme::FixedWidth {
                expected_classes, ..
            } => Some(expected_classes),
            BinScheme::Percentile { n_bins } | BinScheme::EvenRange { n_bins } => Some(n_bins),
            BinScheme::Categorical => None,
        }
    }

    pub fn is_binned(&self) -> bool {
        !matches!(self, BinScheme::Categorical)
    }

    /// Computes edges for this scheme. Categorical schemes have no edges.
    pub fn edges(&self, values: &[f64]) -> Result<Option<BinEdges>> {
        self.validate()?;
        Ok(match *self {
            BinScheme::FixedWidth { width, .. } => Some(fixed_width_edges(values, width)?),
            BinScheme::Percentile { n_bins } => Some(percentile_edges(values, n_bins)?),
            BinScheme::EvenRange { n_bins } => Some(even_range_edges(values, n_bins)?),
            BinScheme::Categorical => None,
        })
    }
}

impl fmt::Display for BinScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BinScheme::FixedWidth {
                width,
                expected_classes,
            } => write!(f, "fixed_width(width={width}, expected={expected_classes})"),
            BinScheme::Percentile { n_bins } => write!(f, "percentile(n_bins={n_bins})"),
            BinScheme::EvenRange { n_bins } => write!(f, "even_range(n_bins={n_bins})"),
            BinScheme::Categorical => f.write_str("categorical"),
        }
    }
}

/// Bin boundaries for one variable plus one rendered label per bin.
///
/// Edges are strictly increasing, except for the degenerate single bin
/// `[v, v]` produced when every value is identical.
#[derive(Debug, Clone, PartialEq)]
pub struct BinEdges {
    pub variable: String,
    edges: Vec<f64>,
    labels: Vec<String>,
    units: Option<String>,
}

impl BinEdges {
    fn from_edges(edges: Vec<f64>) -> Self {
        debug_assert!(edges.len() >= 2);
        let mut b = BinEdges {
            variable: String::new(),
            edges,
            labels: Vec::new(),
            units: None,
        };
        b.render_labels();
        b
    }

    pub fn with_variable(mut self, variable: impl Into<String>) -> Self {
        self.variable = variable.into();
        self
    }

    /// Appends a unit suffix to every label, e.g. `(5.0-5.5)°C`.
    pub fn with_units(mut self, units: Option<&str>) -> Self {
        self.units = units.filter(|u| !u.is_empty()).map(str::to_string);
        self.render_labels();
        self
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn n_bins(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.edges.len() == 2 && self.edges[0] == self.edges[1]
    }

    /// Bounds at one decimal place; if two bins would render identically the
    /// precision is raised until every label is distinct.
    fn render_labels(&mut self) {
        let suffix = self.units.as_deref().unwrap_or("");
        for decimals in 1..=9 {
            let labels: Vec<String> = self
                .edges
                .windows(2)
                .map(|w| format!("({}-{}){}", fmt_bound(w[0], decimals), fmt_bound(w[1], decimals), suffix))
                .collect();
            let distinct: HashSet<&String> = labels.iter().collect();
            if distinct.len() == labels.len() || decimals == 9 {
                self.labels = labels;
                return;
            }
        }
    }

    /// Index of the bin holding `value`.
    pub fn bin_index(&self, value: f64) -> Result<usize> {
        if !value.is_finite() {
            return Err(DiscretizeError::NonFinite(value));
        }
        let lo = self.edges[0];
        let hi = *self.edges.last().unwrap();
        if value < lo || value > hi {
            return Err(DiscretizeError::OutOfRange {
                variable: self.variable.clone(),
                value,
                lo,
                hi,
            });
        }
        // number of interior edges <= value
        let interior = &self.edges[1..self.edges.len() - 1];
        Ok(interior.partition_point(|&e| e <= value))
    }
}

fn fmt_bound(x: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, x);
    // avoid "-0.0"
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn check_values(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(DiscretizeError::EmptyValues);
    }
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if !v.is_finite() {
            return Err(DiscretizeError::NonFinite(v));
        }
        min = min.min(v);
        max = max.max(v);
    }
    Ok((min, max))
}

// Tolerance for x / width landing a hair below an integer.
const MULTIPLE_EPS: f64 = 1e-9;

/// Fixed-width bins anchored at multiples of `width`.
///
/// The first edge is `floor(min / width) * width`; the last is the smallest
/// multiple of `width` strictly greater than `max`.
pub fn fixed_width_edges(values: &[f64], width: f64) -> Result<BinEdges> {
    if !(width.is_finite() && width > 0.0) {
        return Err(DiscretizeError::InvalidWidth(width));
    }
    let (min, max) = check_values(values)?;
    let mut first = (min / width + MULTIPLE_EPS).floor() as i64;
    if first as f64 * width > min {
        first -= 1;
    }
    let mut last = (max / width + MULTIPLE_EPS).floor() as i64 + 1;
    if last as f64 * width <= max {
        last += 1;
    }
    // k * width rather than repeated addition keeps edges on round multiples
    let edges = (first..=last).map(|k| k as f64 * width).collect();
    Ok(BinEdges::from_edges(edges))
}

/// Quantile at `q` by linear interpolation between order statistics
/// (`h = (n - 1) q`).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bins at `k / n_bins`, `k = 0..=n_bins`. Equal consecutive
/// edges are merged, so heavy ties produce fewer bins.
pub fn percentile_edges(values: &[f64], n_bins: usize) -> Result<BinEdges> {
    if n_bins < 2 {
        return Err(DiscretizeError::InvalidBinCount(n_bins));
    }
    let (min, max) = check_values(values)?;
    if min == max {
        return Ok(BinEdges::from_edges(vec![min, max]));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut edges: Vec<f64> = Vec::with_capacity(n_bins + 1);
    for k in 0..=n_bins {
        let e = if k == n_bins {
            max
        } else {
            quantile_sorted(&sorted, k as f64 / n_bins as f64)
        };
        if edges.last().is_none_or(|&prev| e > prev) {
            edges.push(e);
        }
    }
    Ok(BinEdges::from_edges(edges))
}

/// `n_bins` equal-width bins over exactly `[min, max]`.
pub fn even_range_edges(values: &[f64], n_bins: usize) -> Result<BinEdges> {
    if n_bins < 2 {
        return Err(DiscretizeError::InvalidBinCount(n_bins));
    }
    let (min, max) = check_values(values)?;
    if min == max {
        return Ok(BinEdges::from_edges(vec![min, max]));
    }
    let width = (max - min) / n_bins as f64;
    let mut edges: Vec<f64> = (0..n_bins).map(|k| min + k as f64 * width).collect();
    edges.push(max);
    Ok(BinEdges::from_edges(edges))
}

/// Label of the bin containing `value`.
pub fn assign_bin(value: f64, edges: &BinEdges) -> Result<&str> {
    let i = edges.bin_index(value)?;
    Ok(&edges.labels[i])
}

/// Column data after parsing.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub class: ItemClass,
    pub data: ColumnData,
}

/// Why a row was excluded at load time.
#[derive(Debug, Clone, PartialEq)]
pub enum DropReason {
    Missing { column: String },
    Unparseable { column: String, value: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DroppedRow {
    /// 1-based data row number (header excluded).
    pub row: usize,
    pub plot_id: String,
    pub reason: DropReason,
}

/// A parsed plot × variable table.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub id_column: String,
    pub plot_ids: Vec<String>,
    pub columns: Vec<Column>,
    pub dropped: Vec<DroppedRow>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.plot_ids.len()
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn dropped_missing(&self) -> usize {
        self.dropped
            .iter()
            .filter(|d| matches!(d.reason, DropReason::Missing { .. }))
            .count()
    }

    pub fn dropped_unparseable(&self) -> usize {
        self.dropped.len() - self.dropped_missing()
    }
}

/// What `load_table` needs to know about the file.
#[derive(Debug, Clone)]
pub struct TableSpec {
    pub id_column: String,
    pub delimiter: u8,
    /// Columns parsed as reals.
    pub numeric_columns: Vec<String>,
    /// Columns where an empty cell drops the row.
    pub required_columns: Vec<String>,
}

impl Default for TableSpec {
    fn default() -> Self {
        TableSpec {
            id_column: "idplot".to_string(),
            delimiter: b',',
            numeric_columns: Vec::new(),
            required_columns: Vec::new(),
        }
    }
}

/// Validates a column name of the form `X_YYYYYY` and returns its class.
pub fn column_class(name: &str) -> Result<ItemClass> {
    let mut chars = name.chars();
    let prefix = chars.next();
    let sep = chars.next();
    let rest = chars.as_str();
    match (prefix, sep) {
        (Some(p), Some('_'))
            if p.is_ascii_uppercase()
                && !rest.is_empty()
                && rest.chars().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_') =>
        {
            ItemClass::from_prefix(p).ok_or_else(|| {
                DiscretizeError::Schema(format!("column {name:?} has unknown category prefix {p:?}"))
            })
        }
        _ => Err(DiscretizeError::Schema(format!(
            "column {name:?} does not follow the X_YYYYYY naming convention"
        ))),
    }
}

fn is_missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "N/A" | "NaN" | "nan" | "null" | "NULL")
}

pub fn load_table(path: &Path, spec: &TableSpec) -> Result<RawTable> {
    let file = std::fs::File::open(path)?;
    load_table_from_reader(file, spec)
}

/// Parses delimited text with a header row. Rows with a missing cell in a
/// required column, or an unparseable numeric cell, are dropped and recorded.
pub fn load_table_from_reader<R: Read>(reader: R, spec: &TableSpec) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(spec.delimiter)
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers: Vec<String> = rdr.headers()?.iter().map(|h| h.trim_start_matches('\u{feff}').to_string()).collect();
    if headers.is_empty() || headers.iter().all(String::is_empty) {
        return Err(DiscretizeError::Schema("missing header row".into()));
    }
    let id_pos = headers
        .iter()
        .position(|h| *h == spec.id_column)
        .ok_or_else(|| DiscretizeError::Schema(format!("id column {:?} not found in header", spec.id_column)))?;

    let mut seen = HashSet::new();
    let mut columns = Vec::new();
    let mut positions = Vec::new();
    for (pos, name) in headers.iter().enumerate() {
        if pos == id_pos {
            continue;
        }
        if !seen.insert(name.as_str()) {
            return Err(DiscretizeError::Schema(format!("duplicate column {name:?}")));
        }
        let class = column_class(name)?;
        let data = if spec.numeric_columns.iter().any(|c| c == name) {
            ColumnData::Numeric(Vec::new())
        } else {
            ColumnData::Text(Vec::new())
        };
        columns.push(Column {
            name: name.clone(),
            class,
            data,
        });
        positions.push(pos);
    }
    for c in spec.numeric_columns.iter().chain(&spec.required_columns) {
        if !seen.contains(c.as_str()) {
            return Err(DiscretizeError::UnknownVariable(c.clone()));
        }
    }
    let required: Vec<bool> = columns
        .iter()
        .map(|c| spec.required_columns.contains(&c.name) || matches!(c.data, ColumnData::Numeric(_)))
        .collect();

    let mut plot_ids = Vec::new();
    let mut plot_seen = HashSet::new();
    let mut dropped = Vec::new();
    let mut parsed: Vec<Option<f64>> = vec![None; columns.len()];
    for (rowno, record) in rdr.records().enumerate() {
        let record = record?;
        let plot = record.get(id_pos).unwrap_or("").to_string();
        let mut drop = None;
        for (ci, (col, &pos)) in columns.iter().zip(&positions).enumerate() {
            let cell = record.get(pos).unwrap_or("");
            parsed[ci] = None;
            if is_missing(cell) {
                if required[ci] {
                    drop = Some(DropReason::Missing {
                        column: col.name.clone(),
                    });
                    break;
                }
                continue;
            }
            if let ColumnData::Numeric(_) = col.data {
                match cell.parse::<f64>() {
                    Ok(v) if v.is_finite() => parsed[ci] = Some(v),
                    _ => {
                        drop = Some(DropReason::Unparseable {
                            column: col.name.clone(),
                            value: cell.to_string(),
                        });
                        break;
                    }
                }
            }
        }
        if let Some(reason) = drop {
            dropped.push(DroppedRow {
                row: rowno + 1,
                plot_id: plot,
                reason,
            });
            continue;
        }
        if plot.is_empty() {
            return Err(DiscretizeError::Schema(format!("row {} has an empty plot id", rowno + 1)));
        }
        if !plot_seen.insert(plot.clone()) {
            return Err(DiscretizeError::DuplicatePlot(plot));
        }
        for (ci, (col, &pos)) in columns.iter_mut().zip(&positions).enumerate() {
            match &mut col.data {
                ColumnData::Numeric(v) => v.push(parsed[ci].unwrap_or(f64::NAN)),
                ColumnData::Text(v) => {
                    let cell = record.get(pos).unwrap_or("");
                    v.push(if is_missing(cell) { String::new() } else { cell.to_string() });
                }
            }
        }
        plot_ids.push(plot);
    }
    Ok(RawTable {
        id_column: spec.id_column.clone(),
        plot_ids,
        columns,
        dropped,
    })
}

/// One variable to encode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    /// Source column, e.g. `C_WC0004`.
    pub column: String,
    /// Label prefix of the emitted items, e.g. `bio4`.
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<String>,
    pub scheme: BinScheme,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EncodingSpec {
    #[serde(default)]
    pub variables: Vec<VariableSpec>,
    #[serde(default)]
    pub species_columns: Vec<String>,
}

impl EncodingSpec {
    /// The table layout this encoding needs.
    pub fn table_spec(&self, id_column: &str) -> TableSpec {
        TableSpec {
            id_column: id_column.to_string(),
            delimiter: b',',
            numeric_columns: self
                .variables
                .iter()
                .filter(|v| v.scheme.is_binned())
                .map(|v| v.column.clone())
                .collect(),
            required_columns: self.variables.iter().map(|v| v.column.clone()).collect(),
        }
    }
}

/// Realized vs nominal class count for one variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassAudit {
    pub variable: String,
    pub scheme: BinScheme,
    pub expected: Option<usize>,
    /// Bins produced by the edges (or distinct levels for categoricals).
    pub realized: usize,
    /// Bins that received at least one row.
    pub occupied: usize,
}

impl ClassAudit {
    pub fn mismatch(&self) -> bool {
        self.expected.is_some_and(|e| e != self.realized)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EncodingReport {
    pub audits: Vec<ClassAudit>,
    /// Plots that produced no item at all.
    pub empty_tids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Encoded {
    pub db: TransactionDb,
    pub edges: Vec<BinEdges>,
    pub report: EncodingReport,
}

fn parse_presence(cell: &str) -> Option<bool> {
    match cell.trim().to_ascii_lowercase().as_str() {
        "" | "0" | "false" | "f" | "no" | "n" => Some(false),
        "1" | "true" | "t" | "yes" | "y" | "x" => Some(true),
        other => other.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0).map(|v| v > 0.0),
    }
}

/// Species item label: the column name without its `P_` prefix.
pub fn species_label(column: &str) -> &str {
    column.get(2..).filter(|s| !s.is_empty()).unwrap_or(column)
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// One-hot encodes `table` into a transaction database.
///
/// Items are interned row by row: present species in `species_columns`
/// order, then one item per variable in `variables` order. Each transaction's
/// tid is its plot id.
pub fn encode_transactions(table: &RawTable, spec: &EncodingSpec) -> Result<Encoded> {
    for v in &spec.variables {
        v.scheme.validate()?;
    }
    let lookup = |name: &str| table.column(name).ok_or_else(|| DiscretizeError::UnknownVariable(name.to_string()));

    let species: Vec<(&Column, &[String])> = spec
        .species_columns
        .iter()
        .map(|name| {
            let col = lookup(name)?;
            match &col.data {
                ColumnData::Text(v) => Ok((col, v.as_slice())),
                ColumnData::Numeric(_) => Err(DiscretizeError::Schema(format!(
                    "species column {name:?} must not be declared numeric"
                ))),
            }
        })
        .collect::<Result<_>>()?;

    enum Encoder<'a> {
        Binned { edges: BinEdges, values: &'a [f64] },
        Categorical { values: &'a [String] },
    }

    let mut encoders = Vec::with_capacity(spec.variables.len());
    let mut all_edges = Vec::new();
    for v in &spec.variables {
        let col = lookup(&v.column)?;
        let enc = match (&v.scheme, &col.data) {
            (BinScheme::Categorical, ColumnData::Text(values)) => Encoder::Categorical { values },
            (BinScheme::Categorical, ColumnData::Numeric(_)) => {
                return Err(DiscretizeError::Schema(format!(
                    "categorical variable {:?} was loaded as numeric",
                    v.column
                )))
            }
            (scheme, ColumnData::Numeric(values)) => {
                let edges = scheme
                    .edges(values)?
                    .expect("binned scheme yields edges")
                    .with_units(v.units.as_deref())
                    .with_variable(v.column.clone());
                all_edges.push(edges.clone());
                Encoder::Binned { edges, values }
            }
            (_, ColumnData::Text(_)) => return Err(DiscretizeError::NotNumeric(v.column.clone())),
        };
        encoders.push((v, col.class, enc));
    }

    let mut catalog = ItemCatalog::new();
    let mut transactions = Vec::with_capacity(table.n_rows());
    let mut occupied: Vec<HashSet<String>> = vec![HashSet::new(); encoders.len()];
    let mut empty_tids = Vec::new();
    for (row, plot) in table.plot_ids.iter().enumerate() {
        let mut items = Vec::new();
        for (col, values) in &species {
            let cell = &values[row];
            let present = parse_presence(cell).ok_or_else(|| DiscretizeError::BadPresence {
                plot: plot.clone(),
                column: col.name.clone(),
                value: cell.clone(),
            })?;
            if present {
                items.push(catalog.intern(species_label(&col.name), ItemClass::Species)?);
            }
        }
        for (ei, (v, class, enc)) in encoders.iter().enumerate() {
            let level = match enc {
                Encoder::Binned { edges, values } => assign_bin(values[row], edges)?.to_string(),
                Encoder::Categorical { values } => collapse_ws(&values[row]),
            };
            let label = collapse_ws(&format!("{} {}", v.label, level));
            items.push(catalog.intern(&label, *class)?);
            occupied[ei].insert(level);
        }
        if items.is_empty() {
            empty_tids.push(plot.clone());
        }
        transactions.push(Transaction::new(plot.clone(), items));
    }

    let audits = encoders
        .iter()
        .zip(&occupied)
        .map(|((v, _, enc), occ)| ClassAudit {
            variable: v.column.clone(),
            scheme: v.scheme.clone(),
            expected: v.scheme.expected_classes(),
            realized: match enc {
                Encoder::Binned { edges, .. } => edges.n_bins(),
                Encoder::Categorical { .. } => occ.len(),
            },
            occupied: occ.len(),
        })
        .collect();

    Ok(Encoded {
        db: TransactionDb::new(catalog, transactions)?,
        edges: all_edges,
        report: EncodingReport { audits, empty_tids },
    })
}
