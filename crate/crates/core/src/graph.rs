//! Rule graphs in Graphviz DOT.
//!
//! Items are plain-text nodes; every rule is a round node with edges from its
//! antecedent items and to its consequent items. A rule node's width encodes
//! confidence and its fill colour encodes lift:
//!
//! * width: affine in confidence, `conf_floor -> MIN_WIDTH`, `1 -> MAX_WIDTH`
//!   (inches), clamped;
//! * colour: linear RGB ramp from [`LOW_COLOR`] at the smallest lift of the
//!   whole rule table to [`HIGH_COLOR`] at the largest.
//!
//! The consequent is the root of a radial (`twopi`) layout, which draws it at
//! the centre.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::formats::RuleRow;

pub const MIN_WIDTH: f64 = 0.3;
pub const MAX_WIDTH: f64 = 1.0;
pub const LOW_COLOR: (u8, u8, u8) = (0xfe, 0xe8, 0xc8);
pub const HIGH_COLOR: (u8, u8, u8) = (0xe3, 0x4a, 0x33);

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("no rule has consequent {label:?}; available consequents: {}", available.join(", "))]
    UnknownConsequent { label: String, available: Vec<String> },
}

/// Rule-node width for a confidence value.
pub fn node_width(confidence: f64, conf_floor: f64) -> f64 {
    let t = if conf_floor >= 1.0 {
        1.0
    } else {
        ((confidence - conf_floor) / (1.0 - conf_floor)).clamp(0.0, 1.0)
    };
    MIN_WIDTH + t * (MAX_WIDTH - MIN_WIDTH)
}

/// Fill colour (`#rrggbb`) for a lift within `[lo, hi]`.
pub fn lift_color(lift: f64, lo: f64, hi: f64) -> String {
    let t = if hi > lo { ((lift - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 1.0 };
    let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        mix(LOW_COLOR.0, HIGH_COLOR.0),
        mix(LOW_COLOR.1, HIGH_COLOR.1),
        mix(LOW_COLOR.2, HIGH_COLOR.2)
    )
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

/// Every distinct consequent item in the table, sorted.
pub fn consequents(rows: &[RuleRow]) -> Vec<String> {
    rows.iter()
        .flat_map(|r| r.consequent.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// DOT text for the rules whose consequent contains `consequent`.
pub fn rule_graph(rows: &[RuleRow], consequent: &str, conf_floor: f64) -> Result<String, GraphError> {
    let selected: Vec<&RuleRow> = rows
        .iter()
        .filter(|r| r.consequent.iter().any(|c| c == consequent))
        .collect();
    if selected.is_empty() {
        return Err(GraphError::UnknownConsequent {
            label: consequent.to_string(),
            available: consequents(rows),
        });
    }
    let (lo, hi) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.lift), hi.max(r.lift)));

    // item node ids in first-appearance order; the consequent is "c"
    let mut items: Vec<&str> = Vec::new();
    fn item_id<'a>(label: &'a str, consequent: &str, items: &mut Vec<&'a str>) -> String {
        if label == consequent {
            return "c".to_string();
        }
        let k = match items.iter().position(|l| *l == label) {
            Some(k) => k,
            None => {
                items.push(label);
                items.len() - 1
            }
        };
        format!("i{k}")
    }
    let mut body = String::new();
    for (k, r) in selected.iter().enumerate() {
        let rid = format!("r{}", k + 1);
        writeln!(
            body,
            "  {rid} [shape=circle, label=\"\", fixedsize=true, width={:.3}, style=filled, fillcolor=\"{}\", tooltip=\"support={} confidence={} lift={}\"];",
            node_width(r.confidence, conf_floor),
            lift_color(r.lift, lo, hi),
            r.support,
            r.confidence,
            r.lift
        )
        .unwrap();
        for a in &r.antecedent {
            let id = item_id(a.as_str(), consequent, &mut items);
            writeln!(body, "  {id} -> {rid};").unwrap();
        }
        for c in &r.consequent {
            let id = item_id(c.as_str(), consequent, &mut items);
            writeln!(body, "  {rid} -> {id};").unwrap();
        }
    }

    let mut out = String::new();
    writeln!(out, "digraph rules {{").unwrap();
    writeln!(out, "  graph [layout=twopi, root=c, overlap=false, ranksep=1.2];").unwrap();
    writeln!(out, "  node [shape=plaintext, fontname=\"Helvetica\"];").unwrap();
    writeln!(out, "  edge [arrowsize=0.6];").unwrap();
    writeln!(out, "  c [label={}, fontsize=18];", quote(consequent)).unwrap();
    for (k, label) in items.iter().enumerate() {
        writeln!(out, "  i{k} [label={}];", quote(label)).unwrap();
    }
    out.push_str(&body);
    out.push_str("}\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(a: &[&str], c: &str, conf: f64, lift: f64) -> RuleRow {
        RuleRow {
            antecedent: a.iter().map(|s| s.to_string()).collect(),
            consequent: vec![c.to_string()],
            support: 0.01,
            confidence: conf,
            lift,
        }
    }

    fn count(dot: &str, pat: &str) -> usize {
        dot.lines().filter(|l| l.contains(pat)).count()
    }

    #[test]
    fn single_rule_graph() {
        let rows = vec![row(&["ARBUNE", "bio4 (550.0-600.0)"], "QUEILE", 0.782, 7.952)];
        let dot = rule_graph(&rows, "QUEILE", 0.7).unwrap();
        assert_eq!(count(&dot, "shape=circle"), 1);
        // two antecedent items plus the consequent
        assert_eq!(count(&dot, "[label="), 3);
        assert_eq!(count(&dot, " -> "), 3);
        assert!(dot.contains("c [label=\"QUEILE\""));
    }

    #[test]
    fn equal_confidence_equal_width() {
        let rows = vec![row(&["A"], "Z", 0.8, 2.0), row(&["B"], "Z", 0.8, 3.0)];
        let dot = rule_graph(&rows, "Z", 0.7).unwrap();
        let widths: Vec<&str> = dot
            .lines()
            .filter(|l| l.contains("shape=circle"))
            .map(|l| l.split("width=").nth(1).unwrap().split(',').next().unwrap())
            .collect();
        assert_eq!(widths.len(), 2);
        assert_eq!(widths[0], widths[1]);
    }

    #[test]
    fn width_is_affine() {
        assert_eq!(node_width(0.7, 0.7), MIN_WIDTH);
        assert_eq!(node_width(1.0, 0.7), MAX_WIDTH);
        assert!((node_width(0.85, 0.7) - (MIN_WIDTH + MAX_WIDTH) / 2.0).abs() < 1e-12);
        assert_eq!(node_width(0.5, 0.7), MIN_WIDTH);
    }

    #[test]
    fn color_ramp_ends() {
        assert_eq!(lift_color(2.6, 2.6, 8.2), "#fee8c8");
        assert_eq!(lift_color(8.2, 2.6, 8.2), "#e34a33");
        assert_eq!(lift_color(5.0, 5.0, 5.0), "#e34a33");
    }

    #[test]
    fn shared_items_emitted_once() {
        let rows = vec![row(&["LARDEC", "bio4"], "PICABI", 0.85, 6.6), row(&["LARDEC"], "PICABI", 0.8, 6.0)];
        let dot = rule_graph(&rows, "PICABI", 0.7).unwrap();
        assert_eq!(count(&dot, "[label=\"LARDEC\"]"), 1);
        assert_eq!(count(&dot, "[label=\"PICABI\""), 1);
    }

    #[test]
    fn unknown_consequent_lists_available() {
        let rows = vec![row(&["A"], "QUEPUB", 0.8, 2.0), row(&["B"], "OSTCAR", 0.8, 2.0)];
        let err = rule_graph(&rows, "PICABI", 0.7).unwrap_err();
        assert_eq!(
            err,
            GraphError::UnknownConsequent {
                label: "PICABI".into(),
                available: vec!["OSTCAR".into(), "QUEPUB".into()]
            }
        );
    }

    #[test]
    fn labels_are_escaped() {
        assert_eq!(quote("a\"b"), "\"a\\\"b\"");
    }
}
