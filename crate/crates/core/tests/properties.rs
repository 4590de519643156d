use std::collections::{BTreeMap, BTreeSet};

use cooccur::fpgrowth::{self, FpTree};
use cooccur::model::{minsup_abs, FrequentItemset, ItemId, Itemset, TransactionDb};
use cooccur::oracle;
use cooccur::rules::{self, RuleFilter};
use cooccur::synth;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn small_db() -> impl Strategy<Value = TransactionDb> {
    (any::<u64>(), 1usize..=10, 1usize..=40).prop_map(|(seed, items, txs)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        synth::random_small(&mut rng, items, txs)
    })
}

fn keyed(v: &[FrequentItemset]) -> BTreeMap<Vec<u32>, u64> {
    v.iter()
        .map(|f| (f.itemset.iter().map(|i| i.0).collect(), f.support))
        .collect()
}

fn count(db: &TransactionDb, set: &Itemset) -> u64 {
    db.transactions().iter().filter(|t| set.is_subset_of(&t.items)).count() as u64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn miners_agree(db in small_db(), rel in 0.02f64..=0.6) {
        let brute = keyed(&oracle::brute_force_frequent(&db, rel).unwrap());
        prop_assert_eq!(&keyed(&fpgrowth::mine(&db, rel)), &brute);
        prop_assert_eq!(&keyed(&oracle::apriori(&db, rel)), &brute);
    }

    #[test]
    fn parallel_mining_is_identical(db in small_db(), rel in 0.02f64..=0.6) {
        let flist = fpgrowth::build_flist(&db, rel);
        let tree = FpTree::build(&db, &flist);
        prop_assert_eq!(tree.mine(), tree.mine_parallel());
    }

    #[test]
    fn downward_closed(db in small_db(), rel in 0.02f64..=0.6) {
        let found = keyed(&fpgrowth::mine(&db, rel));
        for (items, support) in &found {
            prop_assert!(*support >= minsup_abs(rel, db.len()));
            for skip in 0..items.len() {
                if items.len() == 1 {
                    break;
                }
                let sub: Vec<u32> = items.iter().enumerate().filter(|(k, _)| *k != skip).map(|(_, &i)| i).collect();
                let sub_support = found.get(&sub).copied();
                prop_assert!(sub_support.is_some_and(|s| s >= *support), "{:?} missing or smaller", sub);
            }
        }
    }

    #[test]
    fn supports_are_true_counts(db in small_db(), rel in 0.02f64..=0.6) {
        for f in fpgrowth::mine(&db, rel) {
            prop_assert_eq!(f.support, count(&db, &f.itemset));
        }
    }

    #[test]
    fn singletons_complete(db in small_db(), rel in 0.02f64..=0.6) {
        let abs = minsup_abs(rel, db.len());
        let found: BTreeSet<u32> = fpgrowth::mine(&db, rel)
            .iter()
            .filter(|f| f.itemset.len() == 1)
            .map(|f| f.itemset.items()[0].0)
            .collect();
        for i in 0..db.catalog().len() as u32 {
            let c = count(&db, &Itemset::singleton(ItemId(i)));
            prop_assert_eq!(found.contains(&i), c >= abs);
        }
    }

    #[test]
    fn header_matches_tree(db in small_db(), rel in 0.02f64..=0.6) {
        let flist = fpgrowth::build_flist(&db, rel);
        let tree = FpTree::build(&db, &flist);
        prop_assert_eq!(tree.check_invariants(), Ok(()));
        for h in tree.header() {
            prop_assert_eq!(tree.chain_count(h.item), h.total);
            prop_assert_eq!(h.total, count(&db, &Itemset::singleton(h.item)));
        }
        // every transaction through a leaf contains the whole path
        for (items, c) in tree.paths() {
            prop_assert!(count(&db, &Itemset::new(items)) >= c);
        }
    }

    #[test]
    fn rule_identities(db in small_db(), rel in 0.02f64..=0.6, conf in 0.0f64..=1.0) {
        let freq = fpgrowth::mine(&db, rel);
        let filter = RuleFilter { min_conf: conf, max_consequent_size: None, ..RuleFilter::default() };
        let got = rules::generate_rules(&freq, db.len(), &filter, db.catalog()).unwrap();
        let n = db.len() as f64;
        for r in &got {
            let sx = count(&db, &r.antecedent) as f64 / n;
            let sy = count(&db, &r.consequent) as f64 / n;
            let m = &r.metrics;
            prop_assert!((m.lift * sy - m.confidence).abs() <= 1e-12);
            prop_assert!(m.rsupp <= sx.min(sy));
            prop_assert!(m.confidence >= conf && m.confidence <= 1.0);
            prop_assert!(r.antecedent.is_disjoint(&r.consequent));
        }
        let want = oracle::oracle_rules(&db, rel, conf).unwrap();
        prop_assert_eq!(got.len(), want.len());
    }
}
