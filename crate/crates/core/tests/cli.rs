use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cooccur::formats;
use cooccur::model::TransactionDb;
use cooccur::oracle;

fn cooccur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cooccur")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn example_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/example/config.json")
}

const TOY_CSV: &str = "\
idplot,P_PICABI,P_LARDEC,C_WC0004
1,1,1,662
2,0,1,610
3,1,0,700
";

const TOY_CONFIG: &str = r#"{
  "input": "plots.csv",
  "species_columns": ["P_PICABI", "P_LARDEC"],
  "variables": [
    {"column": "C_WC0004", "label": "bio4",
     "scheme": {"type": "fixed_width", "width": 50, "expected_classes": 7}}
  ]
}"#;

fn toy_dir(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plots.csv"), TOY_CSV).unwrap();
    fs::write(dir.path().join("config.json"), config).unwrap();
    dir
}

const TABLE1: &str = "\
1\tLARDEC,PICABI,PINCEM,PINSYL
2\tALNINC,FRAEXC
3\tBETPEN,PICABI,POPTRE
";

#[test]
fn bin_toy_writes_three_transactions() {
    let dir = toy_dir(TOY_CONFIG);
    let out = dir.path().join("out");
    let o = cooccur(&["bin", "--config", p(&dir.path().join("config.json")), "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let tx = fs::read_to_string(out.join("transactions.tsv")).unwrap();
    assert_eq!(tx.lines().count(), 3);
    assert!(tx.lines().next().unwrap().contains("bio4 (650.0-700.0)"));
    assert!(out.join("catalog.csv").exists());
    assert!(fs::read_to_string(out.join("binning_report.csv")).unwrap().contains("C_WC0004"));
    assert!(stdout(&o).contains("transactions=3"));
}

#[test]
fn bin_missing_variable_is_data_error() {
    let dir = toy_dir(&TOY_CONFIG.replace("C_WC0004\", \"label", "C_WC0099\", \"label"));
    let o = cooccur(&["bin", "--config", p(&dir.path().join("config.json"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("C_WC0099"), "{}", stderr(&o));
}

#[test]
fn mine_table1_at_half() {
    let dir = tempfile::tempdir().unwrap();
    let tx = dir.path().join("t.tsv");
    fs::write(&tx, TABLE1).unwrap();
    let out = dir.path().join("out");
    let o = cooccur(&["mine", "--input", p(&tx), "--minsup", "0.5", "--out", p(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("itemsets=1 minsup_abs=2"));
    let dump = fs::read_to_string(out.join("itemsets.tsv")).unwrap();
    assert_eq!(dump.lines().count(), 1);
    assert!(dump.starts_with("PICABI\t2\t"));
}

#[test]
fn minsup_above_one_is_config_error() {
    let o = cooccur(&["mine", "--minsup", "1.5"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(code(&cooccur(&["mine", "--threads", "0"])), 1);
    assert_eq!(code(&cooccur(&["frobnicate"])), 1);
    assert_eq!(code(&cooccur(&["mine", "--consequent-class", "fungi"])), 1);
    assert_eq!(code(&cooccur(&[])), 1);
    assert_eq!(code(&cooccur(&["--help"])), 0);
}

#[test]
fn missing_input_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = cooccur(&["mine", "--input", p(&dir.path().join("nope.tsv"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn rules_match_the_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let tx = dir.path().join("t.tsv");
    let text = "a\tA,B,C\nb\tA,B\nc\tA,C\nd\tB,C\ne\tA,B,C,D\nf\tD\n";
    fs::write(&tx, text).unwrap();
    let out = dir.path().join("out");
    let o = cooccur(&[
        "rules", "--input", p(&tx), "--out", p(&out), "--minsup", "0.3", "--gen-min-conf", "0.2",
        "--min-conf", "0", "--min-lift", "0", "--consequent-class", "any", "--full-precision",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows = formats::read_rules(&fs::read_to_string(out.join("rules.csv")).unwrap()).unwrap();

    let db: TransactionDb = formats::read_transactions(text, None).unwrap();
    let want: Vec<_> = oracle::oracle_rules(&db, 0.3, 0.2)
        .unwrap()
        .into_iter()
        .filter(|r| r.consequent.len() == 1)
        .collect();
    assert_eq!(rows.len(), want.len());
    for r in &want {
        let ante: Vec<String> = db.catalog().labels_of(&r.antecedent).map(String::from).collect();
        let cons: Vec<String> = db.catalog().labels_of(&r.consequent).map(String::from).collect();
        let row = rows
            .iter()
            .find(|x| {
                let mut a = x.antecedent.clone();
                a.sort();
                let mut b = ante.clone();
                b.sort();
                a == b && x.consequent == cons
            })
            .unwrap_or_else(|| panic!("missing rule {ante:?} -> {cons:?}"));
        assert!((row.confidence - r.metrics.confidence).abs() < 1e-12);
        assert!((row.lift - r.metrics.lift).abs() < 1e-12);
        assert!((row.support - r.metrics.rsupp).abs() < 1e-12);
    }
    // lift descending
    assert!(rows.windows(2).all(|w| w[0].lift >= w[1].lift));
}

#[test]
fn confidence_above_one_gives_empty_table() {
    let dir = tempfile::tempdir().unwrap();
    let tx = dir.path().join("t.tsv");
    fs::write(&tx, TABLE1).unwrap();
    let out = dir.path().join("out");
    let o = cooccur(&["rules", "--input", p(&tx), "--out", p(&out), "--minsup", "0.3", "--min-conf", "1.01"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let table = fs::read_to_string(out.join("rules.csv")).unwrap();
    assert_eq!(table.trim_end(), formats::RULE_HEADER);
}

#[test]
fn graph_unknown_consequent_lists_available() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("rules.csv");
    fs::write(&rules, format!("{}\nA|B;PICABI;0.100;0.900;2.000\n", formats::RULE_HEADER)).unwrap();
    let ok = cooccur(&["graph", "--input", p(&rules), "--consequent", "PICABI"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let dot = stdout(&ok);
    assert!(dot.starts_with("digraph"));
    // one rule node, two antecedent items plus the consequent
    assert_eq!(dot.matches("shape=circle").count(), 1);
    assert_eq!(dot.matches("[label=").count(), 3);

    let bad = cooccur(&["graph", "--input", p(&rules), "--consequent", "QUEILE"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("PICABI"));
}

#[test]
fn verify_passes_and_zero_cases_warns() {
    let o = cooccur(&["verify", "--cases", "30"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("pass: 30 cases"));
    let z = cooccur(&["verify", "--cases", "0"]);
    assert_eq!(code(&z), 0);
    assert!(stderr(&z).contains("warning"));
}

#[test]
fn bench_degenerate_shape() {
    let o = cooccur(&["bench", "--transactions", "1", "--items", "20", "--density", "5"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("speedup:"));
}

#[test]
fn run_example_leaves_no_partial_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = cooccur(&["run", "--config", p(&example_config()), "--out", p(&out), "--threads", "2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for name in ["transactions.tsv", "catalog.csv", "itemsets.tsv", "rules.csv", "scatter.csv", "dropped_rows.csv"] {
        assert!(out.join(name).exists(), "{name}");
    }
    let graphs: Vec<_> = fs::read_dir(out.join("graphs")).unwrap().collect();
    assert!(!graphs.is_empty());
    let mut stack = vec![out.clone()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(d).unwrap() {
            let path = e.unwrap().path();
            assert!(!path.to_string_lossy().ends_with(".partial"));
            if path.is_dir() {
                stack.push(path);
            }
        }
    }
}

#[test]
fn staged_run_matches_run() {
    let dir = tempfile::tempdir().unwrap();
    let whole = dir.path().join("whole");
    let staged = dir.path().join("staged");
    let cfg = example_config();
    assert_eq!(code(&cooccur(&["run", "--config", p(&cfg), "--out", p(&whole)])), 0);
    assert_eq!(code(&cooccur(&["bin", "--config", p(&cfg), "--out", p(&staged)])), 0);
    assert_eq!(code(&cooccur(&["mine", "--config", p(&cfg), "--out", p(&staged)])), 0);
    let itemsets = staged.join("itemsets.tsv");
    assert_eq!(code(&cooccur(&["rules", "--config", p(&cfg), "--out", p(&staged), "--itemsets", p(&itemsets)])), 0);
    for name in ["transactions.tsv", "itemsets.tsv", "rules.csv", "scatter.csv"] {
        assert_eq!(fs::read(whole.join(name)).unwrap(), fs::read(staged.join(name)).unwrap(), "{name}");
    }
}
