//! FP-Growth vs Apriori timing on a seeded synthetic database.

use std::time::{Duration, Instant};

use crate::fpgrowth;
use crate::model::minsup_abs;
use crate::oracle;
use crate::synth::{self, SynthShape};

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub shape: SynthShape,
    pub dataset_hash: String,
    pub mean_len: f64,
    pub minsup_rel: f64,
    pub minsup_abs: u64,
    pub fpgrowth_time: Duration,
    pub apriori_time: Duration,
    pub fpgrowth_itemsets: usize,
    pub apriori_itemsets: usize,
}

impl BenchReport {
    /// Apriori time over FP-Growth time.
    pub fn speedup(&self) -> f64 {
        self.apriori_time.as_secs_f64() / self.fpgrowth_time.as_secs_f64().max(1e-9)
    }

    pub fn agree(&self) -> bool {
        self.fpgrowth_itemsets == self.apriori_itemsets
    }

    pub fn summary(&self) -> String {
        format!(
            "dataset sha256={} transactions={} items={} mean_len={:.2} minsup={} (abs {})\n\
             fpgrowth: {:.3} s, {} itemsets\n\
             apriori:  {:.3} s, {} itemsets\n\
             speedup:  {:.1}x",
            self.dataset_hash,
            self.shape.transactions,
            self.shape.items,
            self.mean_len,
            self.minsup_rel,
            self.minsup_abs,
            self.fpgrowth_time.as_secs_f64(),
            self.fpgrowth_itemsets,
            self.apriori_time.as_secs_f64(),
            self.apriori_itemsets,
            self.speedup()
        )
    }
}

/// Generates the database for `shape` and times both miners at `minsup_rel`.
/// Both run single-threaded.
pub fn run(shape: &SynthShape, minsup_rel: f64) -> BenchReport {
    let db = synth::correlated(shape);
    let mean_len = if db.is_empty() {
        0.0
    } else {
        db.transactions().iter().map(|t| t.items.len()).sum::<usize>() as f64 / db.len() as f64
    };

    let start = Instant::now();
    let fp = fpgrowth::mine(&db, minsup_rel);
    let fpgrowth_time = start.elapsed();

    let start = Instant::now();
    let ap = oracle::apriori(&db, minsup_rel);
    let apriori_time = start.elapsed();

    BenchReport {
        shape: *shape,
        dataset_hash: synth::dataset_hash(&db),
        mean_len,
        minsup_rel,
        minsup_abs: minsup_abs(minsup_rel, db.len()),
        fpgrowth_time,
        apriori_time,
        fpgrowth_itemsets: fp.len(),
        apriori_itemsets: ap.len(),
    }
}
