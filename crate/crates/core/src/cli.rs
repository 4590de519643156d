//! The `cooccur` command line: `bin -> mine -> rules -> graph`, plus `run`
//! for the whole chain and `verify` / `bench` for the reference miners.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 verification failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::bench;
use crate::config::{ConfigError, PipelineConfig, Threads};
use crate::discretize::{self, DropReason, EncodingReport};
use crate::formats::{self, FormatError, Precision};
use crate::fpgrowth::{self, FpTree};
use crate::graph;
use crate::model::{FrequentItemset, ItemCatalog, ItemClass, TransactionDb};
use crate::rules;
use crate::synth::SynthShape;
use crate::verify::{self, VerifyBounds};

pub const TRANSACTIONS_FILE: &str = "transactions.tsv";
pub const CATALOG_FILE: &str = "catalog.csv";
pub const BINNING_REPORT_FILE: &str = "binning_report.csv";
pub const DROPPED_FILE: &str = "dropped_rows.csv";
pub const ITEMSETS_FILE: &str = "itemsets.tsv";
pub const RULES_FILE: &str = "rules.csv";
pub const SCATTER_FILE: &str = "scatter.csv";
pub const GRAPHS_DIR: &str = "graphs";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Data(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Verify(_) => 3,
        }
    }
}

macro_rules! data_err {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        }
    )*};
}
data_err!(
    discretize::DiscretizeError,
    FormatError,
    crate::model::ModelError,
    rules::RulesError,
    graph::GraphError
);

#[derive(Debug, Parser)]
#[command(name = "cooccur", version, about = "Frequent-pattern mining of plot x variable tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Discretize and one-hot encode the input table into transactions.
    Bin(Common),
    /// Mine frequent itemsets from a transaction file.
    Mine {
        #[command(flatten)]
        common: Common,
        /// Catalog sidecar; defaults to catalog.csv next to the input.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Generate, score and filter association rules.
    Rules {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Itemset dump from `mine`; without it the transactions are mined.
        #[arg(long)]
        itemsets: Option<PathBuf>,
        /// Confidence floor at generation time.
        #[arg(long)]
        gen_min_conf: Option<f64>,
        /// Render metrics at full precision instead of three decimals.
        #[arg(long)]
        full_precision: bool,
    },
    /// Render the rules with a given consequent as a DOT graph.
    Graph {
        #[command(flatten)]
        common: Common,
        /// Consequent item label, e.g. PICABI.
        #[arg(long)]
        consequent: String,
        /// Write the DOT text here instead of stdout.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Randomized agreement check of FP-Growth, Apriori and brute force.
    Verify {
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 12)]
        max_items: usize,
        #[arg(long, default_value_t = 64)]
        max_transactions: usize,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Skip the rule-level comparison.
        #[arg(long)]
        no_rules: bool,
        /// Where to write a counterexample on failure.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time FP-Growth against Apriori on a synthetic database.
    Bench {
        #[arg(long, default_value_t = 200)]
        items: usize,
        #[arg(long, default_value_t = 10_000)]
        transactions: usize,
        /// Mean items per transaction.
        #[arg(long, default_value_t = 10.0)]
        density: f64,
        #[arg(long, default_value_t = 0.01)]
        minsup: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// bin, mine, rules, and one graph per reported consequent.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        full_precision: bool,
    },
}

/// Flags shared by the pipeline stages; each overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub minsup: Option<f64>,
    /// Reporting confidence floor.
    #[arg(long)]
    pub min_conf: Option<f64>,
    #[arg(long)]
    pub min_lift: Option<f64>,
    /// species, climate, soil, earth_obs (comma-separated) or any.
    #[arg(long)]
    pub consequent_class: Option<String>,
    #[arg(long)]
    pub max_consequent: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads: a positive number or "auto".
    #[arg(long)]
    pub threads: Option<Threads>,
}

impl Common {
    /// Loads the config (or defaults) and applies the flag overrides.
    pub fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => PipelineConfig::load(p)?,
            None => PipelineConfig::default(),
        };
        if let Some(p) = &self.input {
            cfg.input = Some(p.clone());
        }
        if let Some(p) = &self.out {
            cfg.out_dir = p.clone();
        }
        if let Some(v) = self.minsup {
            cfg.minsup = v;
        }
        if let Some(v) = self.min_conf {
            cfg.report_min_conf = v;
        }
        if let Some(v) = self.min_lift {
            cfg.report_min_lift = Some(v);
        }
        if let Some(s) = &self.consequent_class {
            cfg.consequent_classes = parse_classes(s)?;
        }
        if let Some(v) = self.max_consequent {
            cfg.max_consequent_size = Some(v);
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(t) = self.threads {
            cfg.threads = t;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn parse_classes(s: &str) -> Result<Option<Vec<ItemClass>>, CliError> {
    if s.trim() == "any" {
        return Ok(None);
    }
    s.split(',')
        .map(|c| ItemClass::parse(c).ok_or_else(|| CliError::Usage(format!("unknown item class {c:?}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Data(format!("cannot create {}: {e}", dir.display())))
}

fn with_threads<T: Send>(threads: Threads, f: impl FnOnce(bool) -> T + Send) -> Result<T, CliError> {
    match threads {
        Threads::Auto => Ok(f(true)),
        Threads::Fixed(1) => Ok(f(false)),
        Threads::Fixed(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("cannot start {n} threads: {e}")))?;
            Ok(pool.install(|| f(true)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct BinSummary {
    pub transactions: usize,
    pub items: usize,
    pub dropped_missing: usize,
    pub dropped_unparseable: usize,
    pub report: EncodingReport,
}

fn binning_report_csv(report: &EncodingReport) -> String {
    let mut s = String::from("variable,scheme,expected_classes,realized_classes,occupied_classes,audit\n");
    for a in &report.audits {
        writeln!(
            s,
            "{},\"{}\",{},{},{},{}",
            a.variable,
            a.scheme,
            a.expected.map(|e| e.to_string()).unwrap_or_default(),
            a.realized,
            a.occupied,
            if a.mismatch() { "mismatch" } else { "ok" }
        )
        .unwrap();
    }
    s
}

/// Loads the input table, encodes it, and writes the transaction file,
/// catalog sidecar, binning report and dropped-row log into `out_dir`.
pub fn cmd_bin(cfg: &PipelineConfig) -> Result<BinSummary, CliError> {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CliError::Usage("no input table given (config \"input\" or --input)".into()))?;
    let spec = cfg.encoding();
    let table = discretize::load_table(input, &spec.table_spec(&cfg.id_column))?;
    let enc = discretize::encode_transactions(&table, &spec)?;

    create_dir(&cfg.out_dir)?;
    formats::write_atomic(&cfg.out_dir.join(TRANSACTIONS_FILE), &formats::write_transactions(&enc.db)?)?;
    formats::write_atomic(&cfg.out_dir.join(CATALOG_FILE), &formats::write_catalog(enc.db.catalog())?)?;
    formats::write_atomic(&cfg.out_dir.join(BINNING_REPORT_FILE), &binning_report_csv(&enc.report))?;
    let mut dropped = String::from("row,plot_id,reason,column,value\n");
    for d in &table.dropped {
        match &d.reason {
            DropReason::Missing { column } => writeln!(dropped, "{},{},missing,{},", d.row, d.plot_id, column),
            DropReason::Unparseable { column, value } => {
                writeln!(dropped, "{},{},unparseable,{},\"{}\"", d.row, d.plot_id, column, value.replace('"', "\"\""))
            }
        }
        .unwrap();
    }
    formats::write_atomic(&cfg.out_dir.join(DROPPED_FILE), &dropped)?;

    Ok(BinSummary {
        transactions: enc.db.len(),
        items: enc.db.catalog().len(),
        dropped_missing: table.dropped_missing(),
        dropped_unparseable: table.dropped_unparseable(),
        report: enc.report,
    })
}

/// Reads a transaction file plus its catalog sidecar (explicit, or
/// `catalog.csv` beside the transactions when present).
pub fn load_transactions(path: &Path, catalog: Option<&Path>) -> Result<TransactionDb, CliError> {
    let sibling = path.parent().map(|d| d.join(CATALOG_FILE));
    let catalog_path = match catalog {
        Some(p) => Some(p.to_path_buf()),
        None => sibling.filter(|p| p.exists()),
    };
    let cat: Option<ItemCatalog> = match catalog_path {
        Some(p) => Some(formats::read_catalog(&formats::read_to_string(&p)?)?),
        None => None,
    };
    Ok(formats::read_transactions(&formats::read_to_string(path)?, cat)?)
}

#[derive(Debug, Clone)]
pub struct MineSummary {
    pub itemsets: usize,
    pub minsup_abs: u64,
    pub elapsed: Duration,
}

/// Mines `db` with the configured threshold and thread count.
pub fn mine_db(db: &TransactionDb, cfg: &PipelineConfig) -> Result<(Vec<FrequentItemset>, MineSummary), CliError> {
    let start = Instant::now();
    let flist = fpgrowth::build_flist(db, cfg.minsup);
    let minsup_abs = flist.minsup_abs;
    let found = with_threads(cfg.threads, |parallel| {
        let tree = FpTree::build(db, &flist);
        if parallel {
            tree.mine_parallel()
        } else {
            tree.mine()
        }
    })?;
    let summary = MineSummary {
        itemsets: found.len(),
        minsup_abs,
        elapsed: start.elapsed(),
    };
    Ok((found, summary))
}

fn transactions_path(cfg: &PipelineConfig, input: Option<&Path>) -> PathBuf {
    input.map(Path::to_path_buf).unwrap_or_else(|| cfg.out_dir.join(TRANSACTIONS_FILE))
}

/// Mines the transaction file and writes the canonical itemset dump.
pub fn cmd_mine(cfg: &PipelineConfig, input: Option<&Path>, catalog: Option<&Path>) -> Result<MineSummary, CliError> {
    let db = load_transactions(&transactions_path(cfg, input), catalog)?;
    let (found, summary) = mine_db(&db, cfg)?;
    create_dir(&cfg.out_dir)?;
    formats::write_atomic(
        &cfg.out_dir.join(ITEMSETS_FILE),
        &formats::write_itemsets(&found, db.catalog(), db.len())?,
    )?;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct RulesSummary {
    /// Rules passing generation (confidence floor and consequent size).
    pub generated: usize,
    /// Of those, rules whose consequent is within the configured classes.
    pub class_filtered: usize,
    /// Rules in the reported table.
    pub reported: usize,
}

/// Generates rules and writes the reported table plus scatter data for all
/// class-filtered rules.
pub fn rules_for_db(
    db: &TransactionDb,
    frequents: &[FrequentItemset],
    cfg: &PipelineConfig,
    precision: Precision,
) -> Result<RulesSummary, CliError> {
    let generated = rules::generate_rules(frequents, db.len(), &cfg.generation_filter(), db.catalog())?;
    let class_filter = cfg.class_filter();
    let scatter: Vec<_> = generated
        .iter()
        .filter(|r| class_filter.accepts(r, db.catalog()))
        .cloned()
        .collect();
    let report_filter = cfg.report_filter();
    let reported: Vec<_> = scatter
        .iter()
        .filter(|r| report_filter.accepts(r, db.catalog()))
        .cloned()
        .collect();
    create_dir(&cfg.out_dir)?;
    formats::write_atomic(&cfg.out_dir.join(RULES_FILE), &formats::write_rules(&reported, db.catalog(), precision)?)?;
    formats::write_atomic(
        &cfg.out_dir.join(SCATTER_FILE),
        &formats::write_rules(&scatter, db.catalog(), Precision::Full)?,
    )?;
    Ok(RulesSummary {
        generated: generated.len(),
        class_filtered: scatter.len(),
        reported: reported.len(),
    })
}

pub fn cmd_rules(
    cfg: &PipelineConfig,
    input: Option<&Path>,
    catalog: Option<&Path>,
    itemsets: Option<&Path>,
    precision: Precision,
) -> Result<RulesSummary, CliError> {
    let db = load_transactions(&transactions_path(cfg, input), catalog)?;
    let frequents = match itemsets {
        Some(p) => formats::read_itemsets(&formats::read_to_string(p)?, db.catalog())?,
        None => mine_db(&db, cfg)?.0,
    };
    rules_for_db(&db, &frequents, cfg, precision)
}

/// DOT text for one consequent of a rule table file.
pub fn cmd_graph(rules_path: &Path, consequent: &str, conf_floor: f64) -> Result<String, CliError> {
    let rows = formats::read_rules(&formats::read_to_string(rules_path)?)?;
    Ok(graph::rule_graph(&rows, consequent, conf_floor)?)
}

/// File-name-safe form of an item label.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub bin: BinSummary,
    pub mine: MineSummary,
    pub rules: RulesSummary,
    pub graphs: Vec<PathBuf>,
}

/// The whole pipeline through files, as the individual stages would run it.
pub fn cmd_run(cfg: &PipelineConfig, precision: Precision) -> Result<RunSummary, CliError> {
    let bin = cmd_bin(cfg)?;
    let mine = cmd_mine(cfg, None, None)?;
    let rules = cmd_rules(cfg, None, None, Some(&cfg.out_dir.join(ITEMSETS_FILE)), precision)?;
    let rules_path = cfg.out_dir.join(RULES_FILE);
    let rows = formats::read_rules(&formats::read_to_string(&rules_path)?)?;
    let graph_dir = cfg.out_dir.join(GRAPHS_DIR);
    create_dir(&graph_dir)?;
    let mut graphs = Vec::new();
    for label in graph::consequents(&rows) {
        let dot = graph::rule_graph(&rows, &label, cfg.report_min_conf)?;
        let path = graph_dir.join(format!("{}.dot", file_stem(&label)));
        formats::write_atomic(&path, &dot)?;
        graphs.push(path);
    }
    Ok(RunSummary {
        bin,
        mine,
        rules,
        graphs,
    })
}

fn print_bin(s: &BinSummary) {
    println!(
        "transactions={} items={} dropped_missing={} dropped_unparseable={} empty_transactions={}",
        s.transactions,
        s.items,
        s.dropped_missing,
        s.dropped_unparseable,
        s.report.empty_tids.len()
    );
    for a in s.report.audits.iter().filter(|a| a.mismatch()) {
        eprintln!(
            "warning: {} produced {} classes, scheme nominally has {}",
            a.variable,
            a.realized,
            a.expected.unwrap_or_default()
        );
    }
}

fn print_mine(s: &MineSummary) {
    println!(
        "itemsets={} minsup_abs={} elapsed_ms={}",
        s.itemsets,
        s.minsup_abs,
        s.elapsed.as_millis()
    );
}

fn print_rules(s: &RulesSummary) {
    println!(
        "rules_generated={} rules_consequent_class={} rules_reported={}",
        s.generated, s.class_filtered, s.reported
    );
}

/// Runs a parsed command line, printing summaries to stdout.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Bin(common) => print_bin(&cmd_bin(&common.resolve()?)?),
        Command::Mine { common, catalog } => {
            let cfg = common.resolve()?;
            print_mine(&cmd_mine(&cfg, common.input.as_deref(), catalog.as_deref())?);
        }
        Command::Rules {
            common,
            catalog,
            itemsets,
            gen_min_conf,
            full_precision,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(g) = gen_min_conf {
                cfg.gen_min_conf = g;
                cfg.validate()?;
            }
            let precision = if full_precision { Precision::Full } else { Precision::Fixed3 };
            print_rules(&cmd_rules(
                &cfg,
                common.input.as_deref(),
                catalog.as_deref(),
                itemsets.as_deref(),
                precision,
            )?);
        }
        Command::Graph { common, consequent, dot } => {
            let cfg = common.resolve()?;
            let rules_path = common.input.clone().unwrap_or_else(|| cfg.out_dir.join(RULES_FILE));
            let text = cmd_graph(&rules_path, &consequent, cfg.report_min_conf)?;
            match dot {
                Some(p) => formats::write_atomic(&p, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Verify {
            cases,
            max_items,
            max_transactions,
            seed,
            no_rules,
            out,
        } => {
            if max_items > crate::oracle::BRUTE_FORCE_MAX_ITEMS {
                return Err(CliError::Usage(format!(
                    "--max-items is limited to {}",
                    crate::oracle::BRUTE_FORCE_MAX_ITEMS
                )));
            }
            if cases == 0 {
                eprintln!("warning: 0 cases requested; nothing was checked");
            }
            let bounds = VerifyBounds {
                cases,
                max_items,
                max_transactions,
                seed,
                check_rules: !no_rules,
                ..VerifyBounds::default()
            };
            let report = verify::run(&bounds, &verify::fpgrowth_miner);
            match report.failure {
                None => println!(
                    "pass: {} cases, {} itemsets, {} rules agree",
                    report.cases_run, report.itemsets_checked, report.rules_checked
                ),
                Some(cx) => {
                    let dump = cx.dump();
                    if let Some(p) = out {
                        formats::write_atomic(&p, &dump)?;
                    }
                    eprint!("{dump}");
                    return Err(CliError::Verify(cx.what));
                }
            }
        }
        Command::Bench {
            items,
            transactions,
            density,
            minsup,
            seed,
        } => {
            if !(minsup > 0.0 && minsup <= 1.0) {
                return Err(CliError::Usage(format!("--minsup must lie in (0, 1], got {minsup}")));
            }
            if items == 0 || density.is_nan() || density <= 0.0 {
                return Err(CliError::Usage("--items and --density must be positive".into()));
            }
            let shape = SynthShape {
                items,
                transactions,
                density,
                seed,
            };
            let report = bench::run(&shape, minsup);
            println!("{}", report.summary());
            if !report.agree() {
                return Err(CliError::Verify("fpgrowth and apriori found different itemset counts".into()));
            }
        }
        Command::Run { common, full_precision } => {
            let cfg = common.resolve()?;
            let precision = if full_precision { Precision::Full } else { Precision::Fixed3 };
            let s = cmd_run(&cfg, precision)?;
            print_bin(&s.bin);
            print_mine(&s.mine);
            print_rules(&s.rules);
            println!("graphs={}", s.graphs.len());
        }
    }
    Ok(())
}

/// Parses `args` and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
