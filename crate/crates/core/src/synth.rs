//! Seeded synthetic transaction databases.
//!
//! [`correlated`] follows the usual market-basket generator recipe: a pool
//! of latent patterns over popularity-skewed items, with transactions
//! assembled from randomly chosen, randomly thinned patterns. [`random_small`]
//! draws the tiny databases used for oracle comparisons.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use sha2::{Digest, Sha256};

use crate::model::{ItemCatalog, ItemClass, ItemId, Transaction, TransactionDb};

/// Shape of a synthetic benchmark database.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthShape {
    pub items: usize,
    pub transactions: usize,
    /// Mean number of items per transaction.
    pub density: f64,
    pub seed: u64,
}

impl Default for SynthShape {
    fn default() -> Self {
        SynthShape {
            items: 200,
            transactions: 10_000,
            density: 10.0,
            seed: 42,
        }
    }
}

fn catalog(n: usize) -> (ItemCatalog, Vec<ItemId>) {
    let mut c = ItemCatalog::new();
    let ids = (0..n)
        .map(|i| c.intern(&format!("I{i:04}"), ItemClass::Species).unwrap())
        .collect();
    (c, ids)
}

/// Correlated transactions; identical for identical shapes.
pub fn correlated(shape: &SynthShape) -> TransactionDb {
    assert!(shape.items > 0, "need at least one item");
    let mut rng = ChaCha8Rng::seed_from_u64(shape.seed);
    let (cat, ids) = catalog(shape.items);

    // skewed item popularity
    let item_w: Vec<f64> = (0..shape.items).map(|i| 1.0 / ((i + 1) as f64).powf(0.7)).collect();
    let item_dist = WeightedIndex::new(&item_w).unwrap();

    let n_patterns = (shape.items / 2).max(1);
    let pattern_len = Poisson::new(4.0).unwrap();
    let patterns: Vec<Vec<usize>> = (0..n_patterns)
        .map(|_| {
            let len = (pattern_len.sample(&mut rng) as usize).clamp(2, shape.items.max(2));
            let mut p: Vec<usize> = (0..len).map(|_| item_dist.sample(&mut rng)).collect();
            p.sort_unstable();
            p.dedup();
            p
        })
        .collect();
    let pattern_w: Vec<f64> = (0..n_patterns).map(|_| -rng.gen::<f64>().ln()).collect();
    let pattern_dist = WeightedIndex::new(&pattern_w).unwrap();
    // per-pattern probability of keeping each item
    let keep: Vec<f64> = (0..n_patterns).map(|_| rng.gen_range(0.5..0.95)).collect();

    let tx_len = Poisson::new((shape.density - 1.0).max(0.1)).unwrap();
    let mut present = vec![false; shape.items];
    let mut txs = Vec::with_capacity(shape.transactions);
    for t in 0..shape.transactions {
        let target = (1 + tx_len.sample(&mut rng) as usize).min(shape.items);
        let mut items: Vec<usize> = Vec::with_capacity(target + 4);
        let mut attempts = 0;
        while items.len() < target && attempts < 8 * target + 8 {
            attempts += 1;
            if rng.gen_bool(0.2) {
                // background noise
                let i = item_dist.sample(&mut rng);
                if !present[i] {
                    present[i] = true;
                    items.push(i);
                }
                continue;
            }
            let p = pattern_dist.sample(&mut rng);
            for &i in &patterns[p] {
                if items.len() >= target + 2 {
                    break;
                }
                if !present[i] && rng.gen_bool(keep[p]) {
                    present[i] = true;
                    items.push(i);
                }
            }
        }
        for &i in &items {
            present[i] = false;
        }
        txs.push(Transaction::new(t.to_string(), items.into_iter().map(|i| ids[i])));
    }
    TransactionDb::new(cat, txs).expect("generated ids are in the catalog")
}

/// A small random database: up to `max_items` items and between 1 and
/// `max_transactions` transactions. Items get individual inclusion rates, and
/// some transactions repeat an earlier one, so shared prefixes and
/// correlations both occur.
pub fn random_small(rng: &mut impl Rng, max_items: usize, max_transactions: usize) -> TransactionDb {
    let n_items = rng.gen_range(1..=max_items.max(1));
    let n_tx = rng.gen_range(1..=max_transactions.max(1));
    let (cat, ids) = catalog(n_items);
    let rates: Vec<f64> = (0..n_items).map(|_| rng.gen_range(0.05..0.8)).collect();
    let mut rows: Vec<Vec<ItemId>> = Vec::with_capacity(n_tx);
    for _ in 0..n_tx {
        let row = if !rows.is_empty() && rng.gen_bool(0.15) {
            rows[rng.gen_range(0..rows.len())].clone()
        } else {
            ids.iter().zip(&rates).filter(|(_, &r)| rng.gen_bool(r)).map(|(&i, _)| i).collect()
        };
        rows.push(row);
    }
    let txs = rows
        .into_iter()
        .enumerate()
        .map(|(t, items)| Transaction::new(t.to_string(), items))
        .collect();
    TransactionDb::new(cat, txs).expect("generated ids are in the catalog")
}

/// SHA-256 (hex) of the transactions, by tid and item id.
pub fn dataset_hash(db: &TransactionDb) -> String {
    let mut h = Sha256::new();
    for t in db.transactions() {
        h.update(t.tid.as_bytes());
        h.update([0u8]);
        for i in t.items.iter() {
            h.update(i.0.to_le_bytes());
        }
        h.update([0xffu8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
