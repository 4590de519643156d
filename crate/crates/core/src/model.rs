//! Domain types shared by every stage of the pipeline: items and their
//! catalog, transactions, itemsets, and association rules.
//!
//! Items are dense integer ids ([`ItemId`]) assigned in first-seen order by an
//! [`ItemCatalog`]. Every set of items is held as a strictly ascending,
//! duplicate-free vector ([`Itemset`]), so equality, hashing and lexicographic
//! ordering are all structural.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("item label must not be empty")]
    EmptyLabel,
    #[error("item {label:?} is already registered as {existing}, cannot re-register as {requested}")]
    ClassConflict {
        label: String,
        existing: ItemClass,
        requested: ItemClass,
    },
    #[error("duplicate transaction id {0:?}")]
    DuplicateTid(String),
    #[error("transaction {tid:?} references item id {item} not present in the catalog")]
    UnknownItem { tid: String, item: u32 },
    #[error("unknown item label {0:?}")]
    UnknownLabel(String),
}

/// Thematic category of an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ItemClass {
    Species,
    Climate,
    Soil,
    EarthObs,
}

impl ItemClass {
    /// Maps a column-name prefix letter to its class. `P` (plot information,
    /// which includes species presence) maps to [`ItemClass::Species`].
    pub fn from_prefix(prefix: char) -> Option<ItemClass> {
        match prefix {
            'P' => Some(ItemClass::Species),
            'C' => Some(ItemClass::Climate),
            'S' => Some(ItemClass::Soil),
            'E' => Some(ItemClass::EarthObs),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ItemClass::Species => "species",
            ItemClass::Climate => "climate",
            ItemClass::Soil => "soil",
            ItemClass::EarthObs => "earth_obs",
        }
    }

    pub fn parse(s: &str) -> Option<ItemClass> {
        match s.trim().to_ascii_lowercase().as_str() {
            "species" => Some(ItemClass::Species),
            "climate" => Some(ItemClass::Climate),
            "soil" => Some(ItemClass::Soil),
            "earth_obs" | "earthobs" => Some(ItemClass::EarthObs),
            _ => None,
        }
    }
}

impl fmt::Display for ItemClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Dense item identifier, `0..catalog.len()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Bidirectional map between item labels and dense ids, each item tagged
/// with exactly one [`ItemClass`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ItemCatalog {
    labels: Vec<String>,
    classes: Vec<ItemClass>,
    by_label: HashMap<String, ItemId>,
}

impl ItemCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `label`, assigning the next dense id on first sight.
    ///
    /// Interning a known label under a different class is an error.
    pub fn intern(&mut self, label: &str, class: ItemClass) -> Result<ItemId, ModelError> {
        if label.is_empty() {
            return Err(ModelError::EmptyLabel);
        }
        if let Some(&id) = self.by_label.get(label) {
            let existing = self.classes[id.index()];
            if existing != class {
                return Err(ModelError::ClassConflict {
                    label: label.to_string(),
                    existing,
                    requested: class,
                });
            }
            return Ok(id);
        }
        let id = ItemId(self.labels.len() as u32);
        self.labels.push(label.to_string());
        self.classes.push(class);
        self.by_label.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn id_of(&self, label: &str) -> Option<ItemId> {
        self.by_label.get(label).copied()
    }

    pub fn label_of(&self, id: ItemId) -> Option<&str> {
        self.labels.get(id.index()).map(String::as_str)
    }

    pub fn class_of(&self, id: ItemId) -> Option<ItemClass> {
        self.classes.get(id.index()).copied()
    }

    /// Label lookup for ids known to be valid (e.g. taken from a validated
    /// transaction database). Panics on an out-of-range id.
    pub fn label(&self, id: ItemId) -> &str {
        &self.labels[id.index()]
    }

    pub fn class(&self, id: ItemId) -> ItemClass {
        self.classes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, id: ItemId) -> bool {
        id.index() < self.labels.len()
    }

    /// `(id, label, class)` in id order.
    pub fn iter(&self) -> impl Iterator<Item = (ItemId, &str, ItemClass)> + '_ {
        self.labels
            .iter()
            .zip(&self.classes)
            .enumerate()
            .map(|(i, (l, &c))| (ItemId(i as u32), l.as_str(), c))
    }

    /// Renders the items of `set` as labels, in id order.
    pub fn labels_of<'a>(&'a self, set: &'a Itemset) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(move |id| self.label(id))
    }

    /// Resolves labels into an itemset.
    pub fn itemset_from_labels<'s, I>(&self, labels: I) -> Result<Itemset, ModelError>
    where
        I: IntoIterator<Item = &'s str>,
    {
        labels
            .into_iter()
            .map(|l| self.id_of(l).ok_or_else(|| ModelError::UnknownLabel(l.to_string())))
            .collect::<Result<Vec<_>, _>>()
            .map(Itemset::new)
    }
}

/// A set of items, stored strictly ascending without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Itemset(Vec<ItemId>);

impl Itemset {
    /// Canonicalizes any sequence of ids (sorts, removes duplicates).
    pub fn new(mut items: Vec<ItemId>) -> Self {
        items.sort_unstable();
        items.dedup();
        Itemset(items)
    }

    /// Wraps an already strictly ascending vector. Debug builds check the
    /// invariant.
    pub fn from_sorted(items: Vec<ItemId>) -> Self {
        debug_assert!(items.windows(2).all(|w| w[0] < w[1]), "itemset not strictly ascending");
        Itemset(items)
    }

    pub fn empty() -> Self {
        Itemset(Vec::new())
    }

    pub fn singleton(item: ItemId) -> Self {
        Itemset(vec![item])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    /// Merge-based subset test over two ascending sequences.
    pub fn is_subset_of(&self, other: &Itemset) -> bool {
        is_sorted_subset(&self.0, &other.0)
    }

    pub fn is_disjoint(&self, other: &Itemset) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn union(&self, other: &Itemset) -> Itemset {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Itemset::new(v)
    }

    /// Items of `self` not in `other`.
    pub fn difference(&self, other: &Itemset) -> Itemset {
        Itemset(self.0.iter().copied().filter(|i| !other.contains(*i)).collect())
    }

    pub fn into_vec(self) -> Vec<ItemId> {
        self.0
    }
}

impl FromIterator<ItemId> for Itemset {
    fn from_iter<T: IntoIterator<Item = ItemId>>(iter: T) -> Self {
        Itemset::new(iter.into_iter().collect())
    }
}

/// True when ascending `needle` is contained in ascending `hay`.
pub fn is_sorted_subset(needle: &[ItemId], hay: &[ItemId]) -> bool {
    if needle.len() > hay.len() {
        return false;
    }
    let mut j = 0;
    for &x in needle {
        loop {
            if j == hay.len() {
                return false;
            }
            let y = hay[j];
            j += 1;
            if y == x {
                break;
            }
            if y > x {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transaction {
    pub tid: String,
    pub items: Itemset,
}

impl Transaction {
    /// Builds a transaction from any ordering of ids; duplicates collapse.
    pub fn new(tid: impl Into<String>, items: impl IntoIterator<Item = ItemId>) -> Self {
        Transaction {
            tid: tid.into(),
            items: items.into_iter().collect(),
        }
    }
}

/// Immutable transaction database together with the catalog its ids refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct TransactionDb {
    catalog: ItemCatalog,
    transactions: Vec<Transaction>,
}

impl TransactionDb {
    /// Validates that tids are unique and every item id exists in `catalog`.
    pub fn new(catalog: ItemCatalog, transactions: Vec<Transaction>) -> Result<Self, ModelError> {
        let mut seen = HashSet::with_capacity(transactions.len());
        for t in &transactions {
            if !seen.insert(t.tid.as_str()) {
                return Err(ModelError::DuplicateTid(t.tid.clone()));
            }
            if let Some(bad) = t.items.iter().find(|&i| !catalog.contains(i)) {
                return Err(ModelError::UnknownItem {
                    tid: t.tid.clone(),
                    item: bad.0,
                });
            }
        }
        Ok(TransactionDb {
            catalog,
            transactions,
        })
    }

    /// Convenience constructor from label lists; tids are `1..=n`. Every item
    /// is interned as [`ItemClass::Species`].
    pub fn from_labels<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self, ModelError> {
        let mut catalog = ItemCatalog::new();
        let mut txs = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let ids = row
                .iter()
                .map(|l| catalog.intern(l.as_ref(), ItemClass::Species))
                .collect::<Result<Vec<_>, _>>()?;
            txs.push(Transaction::new((i + 1).to_string(), ids));
        }
        TransactionDb::new(catalog, txs)
    }

    pub fn catalog(&self) -> &ItemCatalog {
        &self.catalog
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    /// Number of transactions.
    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }
}

/// An itemset with its exact absolute support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrequentItemset {
    pub itemset: Itemset,
    pub support: u64,
}

impl FrequentItemset {
    pub fn new(itemset: Itemset, support: u64) -> Self {
        FrequentItemset { itemset, support }
    }

    pub fn rsupp(&self, n: usize) -> f64 {
        self.support as f64 / n as f64
    }
}

/// Canonical order for itemset listings: by size, then lexicographically by
/// item id.
pub fn sort_canonical(itemsets: &mut [FrequentItemset]) {
    itemsets.sort_unstable_by(|a, b| {
        a.itemset
            .len()
            .cmp(&b.itemset.len())
            .then_with(|| a.itemset.cmp(&b.itemset))
    });
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics {
    /// Transactions containing antecedent and consequent together.
    pub support_abs: u64,
    pub rsupp: f64,
    pub confidence: f64,
    pub lift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationRule {
    pub antecedent: Itemset,
    pub consequent: Itemset,
    pub metrics: RuleMetrics,
}

/// Absolute support threshold: `ceil(minsup_rel * n)`.
///
/// A product that lands within a few ulps of an integer is snapped to it
/// first, so `0.07 * 100` yields 7 rather than 8.
pub fn minsup_abs(minsup_rel: f64, n: usize) -> u64 {
    let x = minsup_rel * n as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.abs().max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}
