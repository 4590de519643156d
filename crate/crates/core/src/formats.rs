//! Text formats exchanged between pipeline stages.
//!
//! | file            | line format                                          |
//! |-----------------|------------------------------------------------------|
//! | transactions    | `tid<TAB>label1,label2,…` (labels in catalog order)  |
//! | catalog sidecar | `item_id,label,class` with a header row              |
//! | itemsets        | `label1,label2,…<TAB>support_abs<TAB>rsupp`          |
//! | rule table      | `antecedent;consequent;support;confidence;lift`      |
//!
//! In the rule table, itemsets are `|`-joined labels and `support` is the
//! relative support.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::model::{
    AssociationRule, FrequentItemset, ItemCatalog, ItemClass, ItemId, Itemset, ModelError, Transaction, TransactionDb,
};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("label {label:?} contains a character reserved by the {format} format")]
    ReservedChar { label: String, format: &'static str },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Parse { line, msg: msg.into() }
}

pub fn read_to_string(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents` to `<path>.partial` and renames it into place, so a
/// failed run never leaves a truncated file under the final name.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), FormatError> {
    let mut partial = path.as_os_str().to_owned();
    partial.push(".partial");
    let partial = PathBuf::from(partial);
    let io_err = |source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    };
    fs::write(&partial, contents).map_err(io_err)?;
    fs::rename(&partial, path).map_err(io_err)
}

fn check_label(label: &str, reserved: &[char], format: &'static str) -> Result<(), FormatError> {
    if label.contains(|c: char| c == '\n' || c == '\r' || reserved.contains(&c)) {
        return Err(FormatError::ReservedChar {
            label: label.to_string(),
            format,
        });
    }
    Ok(())
}

fn join_labels(catalog: &ItemCatalog, set: &Itemset, sep: char, reserved: &[char], format: &'static str) -> Result<String, FormatError> {
    let mut s = String::new();
    for (k, label) in catalog.labels_of(set).enumerate() {
        check_label(label, reserved, format)?;
        if k > 0 {
            s.push(sep);
        }
        s.push_str(label);
    }
    Ok(s)
}

pub fn write_transactions(db: &TransactionDb) -> Result<String, FormatError> {
    let mut out = String::new();
    for t in db.transactions() {
        check_label(&t.tid, &['\t'], "transaction")?;
        out.push_str(&t.tid);
        out.push('\t');
        out.push_str(&join_labels(db.catalog(), &t.items, ',', &['\t', ','], "transaction")?);
        out.push('\n');
    }
    Ok(out)
}

pub fn write_catalog(catalog: &ItemCatalog) -> Result<String, FormatError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| parse_err(0, e.to_string());
    w.write_record(["item_id", "label", "class"]).map_err(csv_err)?;
    for (id, label, class) in catalog.iter() {
        check_label(label, &[], "catalog")?;
        w.write_record([id.0.to_string().as_str(), label, class.as_str()]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| parse_err(0, e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output of utf-8 input is utf-8"))
}

pub fn read_catalog(text: &str) -> Result<ItemCatalog, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?;
    if header.iter().collect::<Vec<_>>() != ["item_id", "label", "class"] {
        return Err(parse_err(1, "catalog header must be item_id,label,class"));
    }
    let mut catalog = ItemCatalog::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        if rec.len() != 3 {
            return Err(parse_err(line, "expected 3 fields"));
        }
        let id: u32 = rec[0].parse().map_err(|_| parse_err(line, format!("bad item id {:?}", &rec[0])))?;
        let class = ItemClass::parse(&rec[2]).ok_or_else(|| parse_err(line, format!("unknown class {:?}", &rec[2])))?;
        if catalog.id_of(&rec[1]).is_some() {
            return Err(parse_err(line, format!("duplicate label {:?}", &rec[1])));
        }
        let got = catalog.intern(&rec[1], class)?;
        if got != ItemId(id) {
            return Err(parse_err(line, format!("item ids must be contiguous from 0; expected {got}, found {id}")));
        }
    }
    Ok(catalog)
}

/// Parses a transaction file. With a catalog, every label must be in it;
/// without one, labels are interned first-seen as species.
pub fn read_transactions(text: &str, catalog: Option<ItemCatalog>) -> Result<TransactionDb, FormatError> {
    let fixed = catalog.is_some();
    let mut catalog = catalog.unwrap_or_default();
    let mut txs = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        if line.is_empty() {
            continue;
        }
        let (tid, rest) = line
            .split_once('\t')
            .ok_or_else(|| parse_err(lineno, "expected tid<TAB>items"))?;
        if tid.is_empty() {
            return Err(parse_err(lineno, "empty tid"));
        }
        let mut ids = Vec::new();
        for label in rest.split(',').filter(|l| !l.is_empty()) {
            let id = if fixed {
                catalog
                    .id_of(label)
                    .ok_or_else(|| parse_err(lineno, format!("label {label:?} not in catalog")))?
            } else {
                catalog.intern(label, ItemClass::Species)?
            };
            ids.push(id);
        }
        txs.push(Transaction::new(tid, ids));
    }
    Ok(TransactionDb::new(catalog, txs)?)
}

pub fn write_itemsets(itemsets: &[FrequentItemset], catalog: &ItemCatalog, n: usize) -> Result<String, FormatError> {
    let mut out = String::new();
    for f in itemsets {
        let labels = join_labels(catalog, &f.itemset, ',', &['\t', ','], "itemset")?;
        writeln!(out, "{}\t{}\t{}", labels, f.support, f.rsupp(n)).unwrap();
    }
    Ok(out)
}

pub fn read_itemsets(text: &str, catalog: &ItemCatalog) -> Result<Vec<FrequentItemset>, FormatError> {
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let lineno = k + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(parse_err(lineno, "expected labels<TAB>support<TAB>rsupp"));
        }
        let itemset = catalog
            .itemset_from_labels(fields[0].split(','))
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        if itemset.is_empty() {
            return Err(parse_err(lineno, "empty itemset"));
        }
        let support = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad support {:?}", fields[1])))?;
        out.push(FrequentItemset::new(itemset, support));
    }
    Ok(out)
}

/// How metric columns are rendered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// Three decimals.
    #[default]
    Fixed3,
    /// Shortest representation that round-trips.
    Full,
}

fn fmt_metric(x: f64, p: Precision) -> String {
    match p {
        Precision::Fixed3 => format!("{x:.3}"),
        Precision::Full => format!("{x}"),
    }
}

pub const RULE_HEADER: &str = "antecedent;consequent;support;confidence;lift";

pub fn write_rules(rules: &[AssociationRule], catalog: &ItemCatalog, precision: Precision) -> Result<String, FormatError> {
    let mut out = String::from(RULE_HEADER);
    out.push('\n');
    for r in rules {
        let a = join_labels(catalog, &r.antecedent, '|', &[';', '|'], "rule table")?;
        let c = join_labels(catalog, &r.consequent, '|', &[';', '|'], "rule table")?;
        let m = &r.metrics;
        writeln!(
            out,
            "{a};{c};{};{};{}",
            fmt_metric(m.rsupp, precision),
            fmt_metric(m.confidence, precision),
            fmt_metric(m.lift, precision)
        )
        .unwrap();
    }
    Ok(out)
}

/// One parsed row of a rule table.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleRow {
    pub antecedent: Vec<String>,
    pub consequent: Vec<String>,
    pub support: f64,
    pub confidence: f64,
    pub lift: f64,
}

pub fn read_rules(text: &str) -> Result<Vec<RuleRow>, FormatError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end() == RULE_HEADER => {}
        _ => return Err(parse_err(1, format!("rule table must start with header {RULE_HEADER:?}"))),
    }
    let mut rows = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(';').collect();
        if f.len() != 5 {
            return Err(parse_err(lineno, "expected 5 ';'-separated fields"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| parse_err(lineno, format!("bad number {s:?}")));
        let split = |s: &str| s.split('|').map(str::to_string).collect::<Vec<_>>();
        rows.push(RuleRow {
            antecedent: split(f[0]),
            consequent: split(f[1]),
            support: num(f[2])?,
            confidence: num(f[3])?,
            lift: num(f[4])?,
        });
    }
    Ok(rows)
}
