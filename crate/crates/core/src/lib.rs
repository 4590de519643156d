//! Frequent-pattern mining for plot × variable tables.
//!
//! The pipeline turns a table of plots (species presence plus environmental
//! variables) into a transaction database ([`discretize`]), mines frequent
//! itemsets with FP-Growth ([`fpgrowth`]), derives association rules scored by
//! support, confidence and lift ([`rules`]), and exports rule tables and DOT
//! rule graphs ([`formats`], [`graph`]). [`oracle`] holds independent
//! reference miners used by [`verify`] and [`bench`].
//!
//! ```
//! use cooccur::{fpgrowth, model::TransactionDb};
//!
//! let db = TransactionDb::from_labels(&[
//!     vec!["LARDEC", "PICABI", "PINCEM", "PINSYL"],
//!     vec!["ALNINC", "FRAEXC"],
//!     vec!["BETPEN", "PICABI", "POPTRE"],
//! ])?;
//! let frequent = fpgrowth::mine(&db, 0.5);
//! assert_eq!(frequent.len(), 1);
//! assert_eq!(db.catalog().label(frequent[0].itemset.items()[0]), "PICABI");
//! assert_eq!(frequent[0].support, 2);
//! # Ok::<(), cooccur::model::ModelError>(())
//! ```

pub mod bench;
pub mod cli;
pub mod config;
pub mod discretize;
pub mod formats;
pub mod fpgrowth;
pub mod graph;
pub mod model;
pub mod oracle;
pub mod rules;
pub mod synth;
pub mod verify;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/transactions.md")]
    mod transactions {}
    #[doc = include_str!("../../../book/src/discretization.md")]
    mod discretization {}
    #[doc = include_str!("../../../book/src/fpgrowth.md")]
    mod fpgrowth {}
    #[doc = include_str!("../../../book/src/rules.md")]
    mod rules {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
