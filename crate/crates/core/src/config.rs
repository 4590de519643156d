//! Pipeline configuration file (JSON).
//!
//! ```json
//! {
//!   "input": "plots.csv",
//!   "id_column": "idplot",
//!   "out_dir": "out",
//!   "species_columns": ["P_PICABI", "P_LARDEC"],
//!   "variables": [
//!     {"column": "C_WC0004", "label": "bio4",
//!      "scheme": {"type": "fixed_width", "width": 50, "expected_classes": 7}}
//!   ],
//!   "minsup": 0.01,
//!   "gen_min_conf": 0.07,
//!   "report_min_conf": 0.7,
//!   "report_min_lift": 1.2,
//!   "consequent_classes": ["species"],
//!   "max_consequent_size": 1
//! }
//! ```
//!
//! Relative paths are resolved against the directory holding the config file.
//! Every threshold field is optional and defaults as shown.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discretize::{EncodingSpec, VariableSpec};
use crate::model::ItemClass;
use crate::rules::RuleFilter;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Threads {
    #[default]
    Auto,
    Fixed(usize),
}

impl std::str::FromStr for Threads {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(Threads::Auto);
        }
        match s.parse::<usize>() {
            Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
            _ => Err(format!("expected a positive thread count or \"auto\", got {s:?}")),
        }
    }
}

fn default_id_column() -> String {
    "idplot".into()
}
fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn default_minsup() -> f64 {
    0.01
}
fn default_gen_min_conf() -> f64 {
    0.07
}
fn default_report_min_conf() -> f64 {
    0.7
}
fn default_report_min_lift() -> Option<f64> {
    Some(1.2)
}
fn default_consequent_classes() -> Option<Vec<ItemClass>> {
    Some(vec![ItemClass::Species])
}
fn default_max_consequent() -> Option<usize> {
    Some(1)
}
fn default_seed() -> u64 {
    42
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_id_column")]
    pub id_column: String,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub species_columns: Vec<String>,
    #[serde(default)]
    pub variables: Vec<VariableSpec>,
    #[serde(default = "default_minsup")]
    pub minsup: f64,
    #[serde(default = "default_gen_min_conf")]
    pub gen_min_conf: f64,
    #[serde(default = "default_report_min_conf")]
    pub report_min_conf: f64,
    #[serde(default = "default_report_min_lift")]
    pub report_min_lift: Option<f64>,
    /// `null` accepts consequents of any class.
    #[serde(default = "default_consequent_classes")]
    pub consequent_classes: Option<Vec<ItemClass>>,
    /// `null` allows consequents of any size.
    #[serde(default = "default_max_consequent")]
    pub max_consequent_size: Option<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(skip)]
    pub threads: Threads,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: None,
            id_column: default_id_column(),
            out_dir: default_out_dir(),
            species_columns: Vec::new(),
            variables: Vec::new(),
            minsup: default_minsup(),
            gen_min_conf: default_gen_min_conf(),
            report_min_conf: default_report_min_conf(),
            report_min_lift: default_report_min_lift(),
            consequent_classes: default_consequent_classes(),
            max_consequent_size: default_max_consequent(),
            seed: default_seed(),
            threads: Threads::Auto,
        }
    }
}

impl PipelineConfig {
    /// Parses JSON text; relative paths are resolved against `base_dir`.
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let mut cfg: PipelineConfig = serde_json::from_str(text)?;
        if let Some(input) = &cfg.input {
            cfg.input = Some(base_dir.join(input));
        }
        cfg.out_dir = base_dir.join(&cfg.out_dir);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::from_json(&text, base)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if !(self.minsup > 0.0 && self.minsup <= 1.0) {
            return bad(format!("minsup must lie in (0, 1], got {}", self.minsup));
        }
        // confidence floors above 1 are legal and simply select nothing
        for (name, v) in [("gen_min_conf", self.gen_min_conf), ("report_min_conf", self.report_min_conf)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if let Some(l) = self.report_min_lift {
            if !(l.is_finite() && l >= 0.0) {
                return bad(format!("report_min_lift must be a non-negative number, got {l}"));
            }
        }
        if self.max_consequent_size == Some(0) {
            return bad("max_consequent_size must be at least 1".into());
        }
        if self.id_column.is_empty() {
            return bad("id_column must not be empty".into());
        }
        if self.out_dir.as_os_str().is_empty() {
            return bad("out_dir must not be empty".into());
        }
        for v in &self.variables {
            v.scheme.validate().map_err(|e| ConfigError::Invalid(format!("variable {}: {e}", v.column)))?;
            if v.label.trim().is_empty() {
                return bad(format!("variable {} needs a non-empty label", v.column));
            }
        }
        let mut seen = BTreeSet::new();
        for c in self.variables.iter().map(|v| &v.column).chain(&self.species_columns) {
            if !seen.insert(c) {
                return bad(format!("column {c} is listed more than once"));
            }
        }
        Ok(())
    }

    pub fn encoding(&self) -> EncodingSpec {
        EncodingSpec {
            variables: self.variables.clone(),
            species_columns: self.species_columns.clone(),
        }
    }

    fn classes(&self) -> Option<BTreeSet<ItemClass>> {
        self.consequent_classes.as_ref().map(|v| v.iter().copied().collect())
    }

    /// Rule generation: confidence floor and consequent size only.
    pub fn generation_filter(&self) -> RuleFilter {
        RuleFilter {
            min_conf: self.gen_min_conf,
            min_lift: None,
            consequent_classes: None,
            max_consequent_size: self.max_consequent_size,
        }
    }

    /// Generation plus the consequent-class restriction.
    pub fn class_filter(&self) -> RuleFilter {
        RuleFilter {
            consequent_classes: self.classes(),
            ..self.generation_filter()
        }
    }

    /// The reported table.
    pub fn report_filter(&self) -> RuleFilter {
        RuleFilter {
            min_conf: self.report_min_conf.max(self.gen_min_conf),
            min_lift: self.report_min_lift,
            consequent_classes: self.classes(),
            max_consequent_size: self.max_consequent_size,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PipelineConfig::from_json("{}", Path::new("/base")).unwrap();
        assert_eq!(c.minsup, 0.01);
        assert_eq!(c.gen_min_conf, 0.07);
        assert_eq!(c.report_min_conf, 0.7);
        assert_eq!(c.report_min_lift, Some(1.2));
        assert_eq!(c.consequent_classes, Some(vec![ItemClass::Species]));
        assert_eq!(c.max_consequent_size, Some(1));
        assert_eq!(c.out_dir, PathBuf::from("/base/out"));
    }

    #[test]
    fn minsup_above_one_rejected() {
        let err = PipelineConfig::from_json(r#"{"minsup": 1.5}"#, Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }

    #[test]
    fn unknown_field_rejected() {
        assert!(PipelineConfig::from_json(r#"{"minsupp": 0.1}"#, Path::new(".")).is_err());
    }

    #[test]
    fn any_class_is_null() {
        let c = PipelineConfig::from_json(r#"{"consequent_classes": null, "max_consequent_size": null}"#, Path::new(".")).unwrap();
        assert_eq!(c.report_filter().consequent_classes, None);
        assert_eq!(c.report_filter().max_consequent_size, None);
    }

    #[test]
    fn threads_parse() {
        assert_eq!("auto".parse::<Threads>(), Ok(Threads::Auto));
        assert_eq!("4".parse::<Threads>(), Ok(Threads::Fixed(4)));
        assert!("0".parse::<Threads>().is_err());
    }

    #[test]
    fn duplicate_column_rejected() {
        let text = r#"{"species_columns": ["P_PICABI", "P_PICABI"]}"#;
        assert!(PipelineConfig::from_json(text, Path::new(".")).is_err());
    }
}
