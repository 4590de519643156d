//! Randomized three-way agreement between FP-Growth, Apriori and exhaustive
//! enumeration, plus rule-level agreement with the rule oracle.
//!
//! A failing case is shrunk (transactions first, then items) while it keeps
//! failing, and reported as a [`Counterexample`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::formats;
use crate::model::{minsup_abs, AssociationRule, FrequentItemset, ItemId, Itemset, Transaction, TransactionDb};
use crate::oracle;
use crate::rules::{self, RuleFilter};
use crate::synth;

/// The miner under test: `(db, minsup_rel) -> frequent itemsets`.
pub type Miner<'a> = dyn Fn(&TransactionDb, f64) -> Vec<FrequentItemset> + Sync + 'a;

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyBounds {
    pub cases: usize,
    pub max_items: usize,
    pub max_transactions: usize,
    pub minsup_lo: f64,
    pub minsup_hi: f64,
    pub seed: u64,
    /// Also compare generated rules against the rule oracle.
    pub check_rules: bool,
}

impl Default for VerifyBounds {
    fn default() -> Self {
        VerifyBounds {
            cases: 500,
            max_items: 12,
            max_transactions: 64,
            minsup_lo: 0.02,
            minsup_hi: 0.5,
            seed: 0x5eed,
            check_rules: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub case: usize,
    pub minsup_rel: f64,
    pub min_conf: f64,
    pub db: TransactionDb,
    pub what: String,
}

impl Counterexample {
    pub fn dump(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# case {} failed: {}", self.case, self.what).unwrap();
        writeln!(
            s,
            "# minsup_rel={} (minsup_abs={}) min_conf={} transactions={}",
            self.minsup_rel,
            minsup_abs(self.minsup_rel, self.db.len()),
            self.min_conf,
            self.db.len()
        )
        .unwrap();
        s.push_str(&formats::write_transactions(&self.db).unwrap_or_default());
        s
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub cases_run: usize,
    pub itemsets_checked: usize,
    pub rules_checked: usize,
    pub failure: Option<Counterexample>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

fn as_set(v: &[FrequentItemset]) -> BTreeSet<(Vec<u32>, u64)> {
    v.iter()
        .map(|f| (f.itemset.iter().map(|i| i.0).collect(), f.support))
        .collect()
}

fn describe_diff(name: &str, got: &[FrequentItemset], want: &[FrequentItemset]) -> String {
    let g = as_set(got);
    let w = as_set(want);
    let extra: Vec<_> = g.difference(&w).take(5).collect();
    let missing: Vec<_> = w.difference(&g).take(5).collect();
    format!("{name} disagrees with brute force: extra {extra:?}, missing {missing:?}")
}

fn rules_agree(got: &[AssociationRule], want: &[AssociationRule]) -> Result<(), String> {
    let key = |r: &AssociationRule| (r.antecedent.clone(), r.consequent.clone());
    let mut g: Vec<_> = got.iter().collect();
    let mut w: Vec<_> = want.iter().collect();
    g.sort_by_key(|r| key(r));
    w.sort_by_key(|r| key(r));
    if g.len() != w.len() {
        return Err(format!("rule count {} vs oracle {}", g.len(), w.len()));
    }
    for (a, b) in g.iter().zip(&w) {
        if key(a) != key(b) {
            return Err(format!("rule {:?} vs oracle {:?}", key(a), key(b)));
        }
        let (x, y) = (&a.metrics, &b.metrics);
        let close = |p: f64, q: f64| (p - q).abs() <= 1e-12 * p.abs().max(1.0);
        if x.support_abs != y.support_abs
            || !close(x.rsupp, y.rsupp)
            || !close(x.confidence, y.confidence)
            || !close(x.lift, y.lift)
        {
            return Err(format!("metrics of {:?}: {:?} vs oracle {:?}", key(a), x, y));
        }
    }
    Ok(())
}

/// Checks one database; `Err` describes the first disagreement.
pub fn check_case(db: &TransactionDb, minsup_rel: f64, min_conf: f64, miner: &Miner<'_>, check_rules: bool) -> Result<(usize, usize), String> {
    let brute = oracle::brute_force_frequent(db, minsup_rel).map_err(|e| e.to_string())?;
    let mined = miner(db, minsup_rel);
    if as_set(&mined) != as_set(&brute) {
        return Err(describe_diff("fpgrowth", &mined, &brute));
    }
    let apri = oracle::apriori(db, minsup_rel);
    if as_set(&apri) != as_set(&brute) {
        return Err(describe_diff("apriori", &apri, &brute));
    }
    let mut n_rules = 0;
    if check_rules && !db.is_empty() {
        let filter = RuleFilter {
            min_conf,
            max_consequent_size: None,
            ..RuleFilter::default()
        };
        let got = rules::generate_rules(&mined, db.len(), &filter, db.catalog()).map_err(|e| e.to_string())?;
        let want = oracle::oracle_rules(db, minsup_rel, min_conf).map_err(|e| e.to_string())?;
        rules_agree(&got, &want)?;
        n_rules = got.len();
    }
    Ok((brute.len(), n_rules))
}

fn rebuild(db: &TransactionDb, txs: Vec<Transaction>) -> TransactionDb {
    TransactionDb::new(db.catalog().clone(), txs).expect("subset of a valid database")
}

/// Greedy shrinking: drop transactions, then items, while the case still
/// fails. The threshold stays relative, as in the failing run.
fn minimize(db: &TransactionDb, minsup_rel: f64, min_conf: f64, miner: &Miner<'_>, check_rules: bool) -> TransactionDb {
    let fails = |d: &TransactionDb| check_case(d, minsup_rel, min_conf, miner, check_rules).is_err();
    let mut cur = db.clone();
    let mut progress = true;
    while progress {
        progress = false;
        let mut i = 0;
        while i < cur.len() {
            let mut txs = cur.transactions().to_vec();
            txs.remove(i);
            let cand = rebuild(&cur, txs);
            if fails(&cand) {
                cur = cand;
                progress = true;
            } else {
                i += 1;
            }
        }
        for item in 0..cur.catalog().len() as u32 {
            let item = ItemId(item);
            if !cur.transactions().iter().any(|t| t.items.contains(item)) {
                continue;
            }
            let txs = cur
                .transactions()
                .iter()
                .map(|t| Transaction {
                    tid: t.tid.clone(),
                    items: t.items.iter().filter(|&i| i != item).collect::<Itemset>(),
                })
                .collect();
            let cand = rebuild(&cur, txs);
            if fails(&cand) {
                cur = cand;
                progress = true;
            }
        }
    }
    cur
}

/// Runs `bounds.cases` random cases against `miner`, stopping at the first
/// failure.
pub fn run(bounds: &VerifyBounds, miner: &Miner<'_>) -> VerifyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(bounds.seed);
    let mut report = VerifyReport {
        cases_run: 0,
        itemsets_checked: 0,
        rules_checked: 0,
        failure: None,
    };
    for case in 0..bounds.cases {
        let db = synth::random_small(&mut rng, bounds.max_items, bounds.max_transactions);
        let minsup_rel = rng.gen_range(bounds.minsup_lo..=bounds.minsup_hi);
        let min_conf = rng.gen_range(0.0..=1.0);
        report.cases_run += 1;
        match check_case(&db, minsup_rel, min_conf, miner, bounds.check_rules) {
            Ok((i, r)) => {
                report.itemsets_checked += i;
                report.rules_checked += r;
            }
            Err(_) => {
                let small = minimize(&db, minsup_rel, min_conf, miner, bounds.check_rules);
                let what = check_case(&small, minsup_rel, min_conf, miner, bounds.check_rules)
                    .err()
                    .unwrap_or_default();
                report.failure = Some(Counterexample {
                    case,
                    minsup_rel,
                    min_conf,
                    db: small,
                    what,
                });
                break;
            }
        }
    }
    report
}

/// The miner shipped by this crate.
pub fn fpgrowth_miner(db: &TransactionDb, minsup_rel: f64) -> Vec<FrequentItemset> {
    crate::fpgrowth::mine(db, minsup_rel)
}
