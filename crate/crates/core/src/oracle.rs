//! Reference miners used to check FP-Growth: exhaustive enumeration and
//! textbook level-wise Apriori.
//!
//! Both count supports by rescanning the raw transactions. Neither shares
//! code with [`crate::fpgrowth`] or [`crate::rules`].

use std::collections::HashSet;

use thiserror::Error;

use crate::model::{
    is_sorted_subset, minsup_abs, sort_canonical, AssociationRule, FrequentItemset, ItemId, Itemset, RuleMetrics,
    TransactionDb,
};

/// Largest catalog the exhaustive oracle will enumerate.
pub const BRUTE_FORCE_MAX_ITEMS: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("catalog has {0} items; exhaustive enumeration is limited to {BRUTE_FORCE_MAX_ITEMS}")]
    TooManyItems(usize),
}

/// Transactions as bitmasks over catalog ids.
fn masks(db: &TransactionDb) -> Vec<u32> {
    db.transactions()
        .iter()
        .map(|t| t.items.iter().fold(0u32, |m, i| m | (1 << i.0)))
        .collect()
}

fn mask_items(mask: u32) -> Itemset {
    Itemset::from_sorted((0..32).filter(|b| mask & (1 << b) != 0).map(ItemId).collect())
}

fn count_mask(masks: &[u32], s: u32) -> u64 {
    masks.iter().filter(|&&t| t & s == s).count() as u64
}

/// Every non-empty subset of the occurring items with support at least
/// `ceil(minsup_rel * n)`, counted by scanning all transactions.
pub fn brute_force_frequent(db: &TransactionDb, minsup_rel: f64) -> Result<Vec<FrequentItemset>, OracleError> {
    brute_force_frequent_abs(db, minsup_abs(minsup_rel, db.len()))
}

pub fn brute_force_frequent_abs(db: &TransactionDb, minsup_abs: u64) -> Result<Vec<FrequentItemset>, OracleError> {
    let n_items = db.catalog().len();
    if n_items > BRUTE_FORCE_MAX_ITEMS {
        return Err(OracleError::TooManyItems(n_items));
    }
    let minsup_abs = minsup_abs.max(1);
    let masks = masks(db);
    let occurring = masks.iter().fold(0u32, |a, &m| a | m);
    let mut out = Vec::new();
    // walk the submasks of `occurring`
    let mut s = occurring;
    while s != 0 {
        let c = count_mask(&masks, s);
        if c >= minsup_abs {
            out.push(FrequentItemset::new(mask_items(s), c));
        }
        s = (s - 1) & occurring;
    }
    sort_canonical(&mut out);
    Ok(out)
}

fn count_scan(db: &TransactionDb, cand: &[ItemId]) -> u64 {
    db.transactions()
        .iter()
        .filter(|t| is_sorted_subset(cand, t.items.items()))
        .count() as u64
}

/// Level-wise Apriori: L1 from one scan, then candidates of size k+1 by
/// joining pairs of size-k itemsets sharing a (k-1)-prefix, pruning any
/// candidate with an infrequent k-subset, and one counting scan per level.
pub fn apriori(db: &TransactionDb, minsup_rel: f64) -> Vec<FrequentItemset> {
    apriori_abs(db, minsup_abs(minsup_rel, db.len()))
}

pub fn apriori_abs(db: &TransactionDb, minsup_abs: u64) -> Vec<FrequentItemset> {
    let minsup_abs = minsup_abs.max(1);
    let n_items = db.catalog().len();

    let mut counts = vec![0u64; n_items];
    for t in db.transactions() {
        for i in t.items.iter() {
            counts[i.index()] += 1;
        }
    }
    let mut level: Vec<Vec<ItemId>> = (0..n_items)
        .filter(|&i| counts[i] >= minsup_abs && counts[i] > 0)
        .map(|i| vec![ItemId(i as u32)])
        .collect();
    let mut out: Vec<FrequentItemset> = level
        .iter()
        .map(|v| FrequentItemset::new(Itemset::from_sorted(v.clone()), counts[v[0].index()]))
        .collect();

    // dense per-transaction membership, reused across candidates
    let mut present = vec![false; n_items];
    while !level.is_empty() {
        let candidates = generate_candidates(&level);
        if candidates.is_empty() {
            break;
        }
        let mut cand_counts = vec![0u64; candidates.len()];
        for t in db.transactions() {
            if t.items.len() < candidates[0].len() {
                continue;
            }
            for i in t.items.iter() {
                present[i.index()] = true;
            }
            for (c, cnt) in candidates.iter().zip(cand_counts.iter_mut()) {
                if c.iter().all(|i| present[i.index()]) {
                    *cnt += 1;
                }
            }
            for i in t.items.iter() {
                present[i.index()] = false;
            }
        }
        level = Vec::new();
        for (c, cnt) in candidates.into_iter().zip(cand_counts) {
            if cnt >= minsup_abs {
                out.push(FrequentItemset::new(Itemset::from_sorted(c.clone()), cnt));
                level.push(c);
            }
        }
    }
    sort_canonical(&mut out);
    out
}

/// Join step plus subset pruning. `level` holds sorted itemsets of one size
/// in lexicographic order.
fn generate_candidates(level: &[Vec<ItemId>]) -> Vec<Vec<ItemId>> {
    let k = level[0].len();
    let known: HashSet<&[ItemId]> = level.iter().map(Vec::as_slice).collect();
    let mut out = Vec::new();
    for (a_idx, a) in level.iter().enumerate() {
        for b in &level[a_idx + 1..] {
            if a[..k - 1] != b[..k - 1] {
                // sorted input: no later b shares the prefix either
                break;
            }
            let mut cand = a.clone();
            cand.push(b[k - 1]);
            let all_subsets_frequent = (0..cand.len()).all(|skip| {
                let sub: Vec<ItemId> = cand
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != skip)
                    .map(|(_, &x)| x)
                    .collect();
                known.contains(sub.as_slice())
            });
            if all_subsets_frequent {
                out.push(cand);
            }
        }
    }
    out
}

/// Every rule `X -> Y` with `X ∪ Y` frequent, `X`, `Y` non-empty and
/// disjoint, and confidence at least `min_conf`. All three supports come from
/// fresh scans of the transactions. Ordered by (antecedent, consequent).
pub fn oracle_rules(db: &TransactionDb, minsup_rel: f64, min_conf: f64) -> Result<Vec<AssociationRule>, OracleError> {
    let frequent = brute_force_frequent(db, minsup_rel)?;
    let n = db.len() as f64;
    let mut rules = Vec::new();
    for z in frequent.iter().filter(|f| f.itemset.len() >= 2) {
        let items = z.itemset.items();
        let k = items.len();
        for mask in 1u32..((1u32 << k) - 1) {
            let (ante, cons): (Vec<_>, Vec<_>) = (0..k).map(|b| (mask & (1 << b) != 0, items[b])).partition(|p| p.0);
            let x: Vec<ItemId> = ante.into_iter().map(|p| p.1).collect();
            let y: Vec<ItemId> = cons.into_iter().map(|p| p.1).collect();
            let sxy = count_scan(db, items);
            let sx = count_scan(db, &x);
            let sy = count_scan(db, &y);
            let confidence = sxy as f64 / sx as f64;
            if confidence < min_conf {
                continue;
            }
            let rsupp = sxy as f64 / n;
            rules.push(AssociationRule {
                antecedent: Itemset::from_sorted(x),
                consequent: Itemset::from_sorted(y),
                metrics: RuleMetrics {
                    support_abs: sxy,
                    rsupp,
                    confidence,
                    lift: rsupp / ((sx as f64 / n) * (sy as f64 / n)),
                },
            });
        }
    }
    rules.sort_by(|a, b| a.antecedent.cmp(&b.antecedent).then_with(|| a.consequent.cmp(&b.consequent)));
    Ok(rules)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ItemCatalog, ItemClass, Transaction};

    fn db(rows: &[&[&str]]) -> TransactionDb {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        TransactionDb::from_labels(&rows).unwrap()
    }

    fn table1() -> TransactionDb {
        db(&[
            &["LARDEC", "PICABI", "PINCEM", "PINSYL"],
            &["ALNINC", "FRAEXC"],
            &["BETPEN", "PICABI", "POPTRE"],
        ])
    }

    #[test]
    fn brute_force_table1() {
        let d = table1();
        let got = brute_force_frequent(&d, 0.5).unwrap();
        assert_eq!(got, vec![FrequentItemset::new(Itemset::singleton(d.catalog().id_of("PICABI").unwrap()), 2)]);
    }

    #[test]
    fn brute_force_single_transaction_all_subsets() {
        let d = db(&[&["a", "b", "c", "d", "e"]]);
        assert_eq!(brute_force_frequent(&d, 1.0).unwrap().len(), 31);
    }

    #[test]
    fn brute_force_empty() {
        let d = TransactionDb::new(ItemCatalog::new(), vec![]).unwrap();
        assert!(brute_force_frequent(&d, 0.5).unwrap().is_empty());
    }

    #[test]
    fn brute_force_refuses_large_catalog() {
        let mut c = ItemCatalog::new();
        for i in 0..25 {
            c.intern(&format!("i{i}"), ItemClass::Species).unwrap();
        }
        let d = TransactionDb::new(c, vec![Transaction::new("1", [ItemId(0)])]).unwrap();
        assert_eq!(brute_force_frequent(&d, 0.5), Err(OracleError::TooManyItems(25)));
    }

    #[test]
    fn apriori_table1() {
        let d = table1();
        assert_eq!(apriori_abs(&d, 2), brute_force_frequent_abs(&d, 2).unwrap());
    }

    #[test]
    fn apriori_stops_without_frequent_pairs() {
        let d = db(&[&["a", "b"], &["a", "c"], &["b", "c"]]);
        let got = apriori_abs(&d, 2);
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|f| f.itemset.len() == 1));
    }

    #[test]
    fn candidate_pruning() {
        // {0,1},{0,2},{1,2},{1,3} -> join gives {0,1,2} (kept) and {1,2,3} (pruned: {2,3} missing)
        let lv = vec![
            vec![ItemId(0), ItemId(1)],
            vec![ItemId(0), ItemId(2)],
            vec![ItemId(1), ItemId(2)],
            vec![ItemId(1), ItemId(3)],
        ];
        assert_eq!(generate_candidates(&lv), vec![vec![ItemId(0), ItemId(1), ItemId(2)]]);
    }

    #[test]
    fn rules_direct_scan() {
        let d = db(&[&["A", "B"], &["A", "B", "C"], &["A"], &["B"]]);
        let rules = oracle_rules(&d, 0.5, 0.0).unwrap();
        let a = d.catalog().id_of("A").unwrap();
        let b = d.catalog().id_of("B").unwrap();
        let r = rules
            .iter()
            .find(|r| r.antecedent == Itemset::singleton(a) && r.consequent == Itemset::singleton(b))
            .unwrap();
        assert_eq!(r.metrics.support_abs, 2);
        assert_eq!(r.metrics.rsupp, 0.5);
        assert!((r.metrics.confidence - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.metrics.lift - 8.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn rules_confidence_extremes() {
        let d = db(&[&["A", "B"], &["A", "B", "C"], &["A"], &["B", "C"]]);
        let all = oracle_rules(&d, 0.25, 0.0).unwrap();
        // frequent pairs AB(2) AC(1) BC(2) and ABC(1): 2 rules per pair, 6 for the triple
        assert_eq!(all.len(), 3 * 2 + 6);
        let certain = oracle_rules(&d, 0.25, 1.0).unwrap();
        assert!(certain.iter().all(|r| r.metrics.confidence == 1.0));
        for r in &certain {
            let x = &r.antecedent;
            let y = &r.consequent;
            for t in d.transactions() {
                if x.is_subset_of(&t.items) {
                    assert!(y.is_subset_of(&t.items));
                }
            }
        }
        assert!(!certain.is_empty());
    }
}
