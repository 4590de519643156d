//! Association rules from mined frequent itemsets.
//!
//! For a rule `X -> Y` over `n` transactions:
//!
//! | metric      | value                                  |
//! |-------------|----------------------------------------|
//! | support     | `supp(X ∪ Y)` (absolute count)         |
//! | rel. support| `supp(X ∪ Y) / n`                      |
//! | confidence  | `supp(X ∪ Y) / supp(X)`                |
//! | lift        | `confidence / rsupp(Y)`                |
//!
//! Lift is evaluated as `supp(X ∪ Y) · n / (supp(X) · supp(Y))` in integer
//! arithmetic with a single final division, which makes it exactly symmetric
//! in `X` and `Y`.

use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{AssociationRule, FrequentItemset, ItemCatalog, ItemClass, ItemId, Itemset, RuleMetrics};

#[derive(Debug, Error, PartialEq)]
pub enum RulesError {
    #[error("itemset {0:?} is not in the frequent-itemset index (inconsistent mining output)")]
    MissingItemset(Vec<u32>),
    #[error("antecedent has zero support; confidence is undefined")]
    ZeroSupport,
    #[error("antecedent and consequent must be non-empty and disjoint")]
    NotDisjoint,
    #[error("transaction count must be positive")]
    EmptyDatabase,
}

/// Exact supports of mined itemsets, keyed by itemset.
#[derive(Debug, Clone, Default)]
pub struct SupportIndex {
    map: HashMap<Itemset, u64>,
}

impl SupportIndex {
    pub fn new(frequents: &[FrequentItemset]) -> Self {
        SupportIndex {
            map: frequents.iter().map(|f| (f.itemset.clone(), f.support)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Absolute support of a mined itemset.
    pub fn support(&self, itemset: &Itemset) -> Result<u64, RulesError> {
        self.map
            .get(itemset)
            .copied()
            .ok_or_else(|| RulesError::MissingItemset(itemset.iter().map(|i| i.0).collect()))
    }
}

/// Looks up the absolute support of `itemset`.
pub fn support_lookup(itemset: &Itemset, index: &SupportIndex) -> Result<u64, RulesError> {
    index.support(itemset)
}

/// Metrics from exact counts.
pub fn metrics_from_counts(support_xy: u64, support_x: u64, support_y: u64, n: u64) -> Result<RuleMetrics, RulesError> {
    if n == 0 {
        return Err(RulesError::EmptyDatabase);
    }
    if support_x == 0 || support_y == 0 {
        return Err(RulesError::ZeroSupport);
    }
    let num = support_xy as u128 * n as u128;
    let den = support_x as u128 * support_y as u128;
    Ok(RuleMetrics {
        support_abs: support_xy,
        rsupp: support_xy as f64 / n as f64,
        confidence: support_xy as f64 / support_x as f64,
        lift: num as f64 / den as f64,
    })
}

/// Scores `antecedent -> consequent` from the support index.
pub fn score(antecedent: &Itemset, consequent: &Itemset, index: &SupportIndex, n: usize) -> Result<RuleMetrics, RulesError> {
    if antecedent.is_empty() || consequent.is_empty() || !antecedent.is_disjoint(consequent) {
        return Err(RulesError::NotDisjoint);
    }
    let sxy = index.support(&antecedent.union(consequent))?;
    let sx = index.support(antecedent)?;
    let sy = index.support(consequent)?;
    metrics_from_counts(sxy, sx, sy, n as u64)
}

/// Which generated rules to keep.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleFilter {
    pub min_conf: f64,
    pub min_lift: Option<f64>,
    /// Every consequent item must belong to one of these classes.
    pub consequent_classes: Option<BTreeSet<ItemClass>>,
    /// `None` allows consequents of any size.
    pub max_consequent_size: Option<usize>,
}

impl Default for RuleFilter {
    fn default() -> Self {
        RuleFilter {
            min_conf: 0.0,
            min_lift: None,
            consequent_classes: None,
            max_consequent_size: Some(1),
        }
    }
}

impl RuleFilter {
    pub fn with_min_conf(min_conf: f64) -> Self {
        RuleFilter {
            min_conf,
            ..RuleFilter::default()
        }
    }

    /// Thresholds only; class and size constraints are checked separately.
    pub fn passes_metrics(&self, m: &RuleMetrics) -> bool {
        m.confidence >= self.min_conf && self.min_lift.is_none_or(|l| m.lift >= l)
    }

    pub fn passes_consequent(&self, consequent: &Itemset, catalog: &ItemCatalog) -> bool {
        if self.max_consequent_size.is_some_and(|m| consequent.len() > m) {
            return false;
        }
        match &self.consequent_classes {
            Some(classes) => consequent.iter().all(|i| classes.contains(&catalog.class(i))),
            None => true,
        }
    }

    pub fn accepts(&self, rule: &AssociationRule, catalog: &ItemCatalog) -> bool {
        self.passes_metrics(&rule.metrics) && self.passes_consequent(&rule.consequent, catalog)
    }
}

/// Canonical rule order: lift descending, confidence descending, then
/// antecedent and consequent lexicographically by item id.
pub fn sort_rules(rules: &mut [AssociationRule]) {
    rules.sort_by(|a, b| {
        b.metrics
            .lift
            .total_cmp(&a.metrics.lift)
            .then_with(|| b.metrics.confidence.total_cmp(&a.metrics.confidence))
            .then_with(|| a.antecedent.cmp(&b.antecedent))
            .then_with(|| a.consequent.cmp(&b.consequent))
    });
}

/// Generates every rule `X -> Z \ X` for each frequent `Z` with `|Z| >= 2`,
/// scores it from the index, and keeps those passing `filter`. The input must
/// be closed under subsets, as mining output is.
pub fn generate_rules(
    frequents: &[FrequentItemset],
    n: usize,
    filter: &RuleFilter,
    catalog: &ItemCatalog,
) -> Result<Vec<AssociationRule>, RulesError> {
    let index = SupportIndex::new(frequents);
    let per_itemset: Vec<Result<Vec<AssociationRule>, RulesError>> = frequents
        .par_iter()
        .filter(|z| z.itemset.len() >= 2)
        .map(|z| rules_from_itemset(z, &index, n, filter, catalog))
        .collect();
    let mut rules = Vec::new();
    for r in per_itemset {
        rules.extend(r?);
    }
    sort_rules(&mut rules);
    Ok(rules)
}

fn rules_from_itemset(
    z: &FrequentItemset,
    index: &SupportIndex,
    n: usize,
    filter: &RuleFilter,
    catalog: &ItemCatalog,
) -> Result<Vec<AssociationRule>, RulesError> {
    let items = z.itemset.items();
    let max_cons = filter.max_consequent_size.unwrap_or(items.len() - 1).min(items.len() - 1);
    let mut out = Vec::new();
    for size in 1..=max_cons {
        for cons in items.iter().copied().combinations(size) {
            let consequent = Itemset::from_sorted(cons);
            if !filter.passes_consequent(&consequent, catalog) {
                continue;
            }
            let antecedent = z.itemset.difference(&consequent);
            let sx = index.support(&antecedent)?;
            let sy = index.support(&consequent)?;
            let metrics = metrics_from_counts(z.support, sx, sy, n as u64)?;
            if filter.passes_metrics(&metrics) {
                out.push(AssociationRule {
                    antecedent,
                    consequent,
                    metrics,
                });
            }
        }
    }
    Ok(out)
}

/// Rules whose consequent contains `item`.
pub fn with_consequent<'a>(rules: &'a [AssociationRule], item: ItemId) -> impl Iterator<Item = &'a AssociationRule> + 'a {
    rules.iter().filter(move |r| r.consequent.contains(item))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpgrowth;
    use crate::model::TransactionDb;

    fn db(rows: &[&[&str]]) -> TransactionDb {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        TransactionDb::from_labels(&rows).unwrap()
    }

    fn set(d: &TransactionDb, labels: &[&str]) -> Itemset {
        d.catalog().itemset_from_labels(labels.iter().copied()).unwrap()
    }

    #[test]
    fn lookup_table1() {
        let d = db(&[
            &["LARDEC", "PICABI", "PINCEM", "PINSYL"],
            &["ALNINC", "FRAEXC"],
            &["BETPEN", "PICABI", "POPTRE"],
        ]);
        let idx = SupportIndex::new(&fpgrowth::mine(&d, 0.5));
        assert_eq!(support_lookup(&set(&d, &["PICABI"]), &idx), Ok(2));
        assert!(matches!(
            support_lookup(&set(&d, &["LARDEC"]), &idx),
            Err(RulesError::MissingItemset(_))
        ));
    }

    #[test]
    fn score_four_transactions() {
        let d = db(&[&["A", "B"], &["A", "B", "C"], &["A"], &["B"]]);
        let idx = SupportIndex::new(&fpgrowth::mine_abs(&d, 1));
        let m = score(&set(&d, &["A"]), &set(&d, &["B"]), &idx, d.len()).unwrap();
        assert_eq!(m.support_abs, 2);
        assert_eq!(m.rsupp, 0.5);
        assert!((m.confidence - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.lift - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn score_universal_consequent() {
        let d = db(&[&["A", "Y"], &["Y"], &["A", "Y"]]);
        let idx = SupportIndex::new(&fpgrowth::mine_abs(&d, 1));
        let m = score(&set(&d, &["A"]), &set(&d, &["Y"]), &idx, d.len()).unwrap();
        assert_eq!(m.confidence, 1.0);
        assert_eq!(m.lift, 1.0);
    }

    #[test]
    fn score_rejects_overlap() {
        let d = db(&[&["A", "B"]]);
        let idx = SupportIndex::new(&fpgrowth::mine_abs(&d, 1));
        assert_eq!(
            score(&set(&d, &["A", "B"]), &set(&d, &["B"]), &idx, 1),
            Err(RulesError::NotDisjoint)
        );
    }

    #[test]
    fn zero_support_is_an_error() {
        assert_eq!(metrics_from_counts(0, 0, 3, 5), Err(RulesError::ZeroSupport));
    }

    #[test]
    fn reported_rule_implies_consequent_support() {
        // conf / lift recovers rsupp of the consequent
        let rsupp_y: f64 = 0.804 / 8.179;
        assert!((rsupp_y - 0.0983).abs() < 5e-5);
    }

    #[test]
    fn generate_pair_both_directions() {
        let d = db(&[&["A", "B"], &["A", "B"], &["A"]]);
        let freq = fpgrowth::mine_abs(&d, 2);
        let rules = generate_rules(&freq, d.len(), &RuleFilter::with_min_conf(0.0), d.catalog()).unwrap();
        assert_eq!(rules.len(), 2);
        let a = set(&d, &["A"]);
        let b = set(&d, &["B"]);
        let ab = rules.iter().find(|r| r.antecedent == a).unwrap();
        let ba = rules.iter().find(|r| r.antecedent == b).unwrap();
        assert!((ab.metrics.confidence - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(ba.metrics.confidence, 1.0);
        assert_eq!(ab.metrics.lift, ba.metrics.lift);
    }

    #[test]
    fn consequent_class_filter() {
        let mut cat = ItemCatalog::new();
        let sp = cat.intern("PICABI", ItemClass::Species).unwrap();
        let cl = cat.intern("bio4 (650.0-700.0)", ItemClass::Climate).unwrap();
        let txs = vec![
            crate::model::Transaction::new("1", [sp, cl]),
            crate::model::Transaction::new("2", [sp, cl]),
        ];
        let d = TransactionDb::new(cat, txs).unwrap();
        let freq = fpgrowth::mine_abs(&d, 1);
        let filter = RuleFilter {
            consequent_classes: Some([ItemClass::Species].into_iter().collect()),
            ..RuleFilter::default()
        };
        let rules = generate_rules(&freq, d.len(), &filter, d.catalog()).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].consequent, Itemset::singleton(sp));
    }

    #[test]
    fn multi_item_consequents_behind_flag() {
        let d = db(&[&["A", "B", "C"], &["A", "B", "C"]]);
        let freq = fpgrowth::mine_abs(&d, 1);
        let single = generate_rules(&freq, 2, &RuleFilter::default(), d.catalog()).unwrap();
        let any = generate_rules(
            &freq,
            2,
            &RuleFilter {
                max_consequent_size: None,
                ..RuleFilter::default()
            },
            d.catalog(),
        )
        .unwrap();
        // pairs: 3 x 2; triple: 3 single-item consequents, +3 two-item ones
        assert_eq!(single.len(), 9);
        assert_eq!(any.len(), 12);
    }

    #[test]
    fn rules_sorted_by_lift_then_confidence() {
        let d = db(&[&["A", "B"], &["A", "B"], &["A", "C"], &["C"], &["D"], &["B", "D"]]);
        let freq = fpgrowth::mine_abs(&d, 1);
        let rules = generate_rules(&freq, d.len(), &RuleFilter::with_min_conf(0.0), d.catalog()).unwrap();
        for w in rules.windows(2) {
            let (a, b) = (&w[0].metrics, &w[1].metrics);
            assert!(a.lift > b.lift || (a.lift == b.lift && a.confidence >= b.confidence));
        }
    }

    #[test]
    fn min_conf_above_one_yields_nothing() {
        let d = db(&[&["A", "B"], &["A", "B"]]);
        let freq = fpgrowth::mine_abs(&d, 1);
        assert!(generate_rules(&freq, 2, &RuleFilter::with_min_conf(1.01), d.catalog()).unwrap().is_empty());
    }
}
