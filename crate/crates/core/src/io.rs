//! File formats: lattice and congruence JSON, and Graphviz DOT export.
//!
//! A lattice file is either `{"n": 3, "leq": [[1,1,1],[0,1,1],[0,0,1]]}` or
//! `{"n": 3, "covers": [[0,1],[1,2]]}`. Input points are relabeled along a
//! linear extension; the relabeling is reported as `permutation`
//! (`permutation[input] = element`) when a lattice is written back out.
//! A congruence file is `{"blocks": [[0,1],[2]]}` with blocks sorted by
//! their smallest member.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::congruence::{Congruence, CongruenceError, CongruenceFrame};
use crate::lattice::{build_lattice, BuiltLattice, Lattice, LatticeError, Limits};
use crate::poset::Poset;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON at line {line}, column {column}: {message}\n    {context}")]
    Json {
        line: usize,
        column: usize,
        message: String,
        context: String,
    },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Congruence(#[from] CongruenceError),
}

fn json_error(text: &str, e: serde_json::Error) -> IoError {
    let context = text
        .lines()
        .nth(e.line().saturating_sub(1))
        .unwrap_or("")
        .trim_end()
        .to_string();
    IoError::Json {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
        context,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leq: Option<Vec<Vec<u8>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<Vec<[usize; 2]>>,
    /// Output metadata; ignored on input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub permutation: Option<Vec<usize>>,
}

impl LatticeFile {
    pub fn from_lattice(l: &Lattice, permutation: Option<&[usize]>) -> LatticeFile {
        LatticeFile {
            n: l.len(),
            leq: Some(
                l.order_table()
                    .into_iter()
                    .map(|row| row.into_iter().map(u8::from).collect())
                    .collect(),
            ),
            covers: None,
            permutation: permutation.map(<[usize]>::to_vec),
        }
    }

    pub fn to_poset(&self) -> Result<Poset, IoError> {
        match (&self.leq, &self.covers) {
            (Some(leq), None) => {
                if leq.len() != self.n {
                    return Err(IoError::Schema(format!(
                        "\"leq\" has {} rows but \"n\" is {}",
                        leq.len(),
                        self.n
                    )));
                }
                let mut table = Vec::with_capacity(self.n);
                for (i, row) in leq.iter().enumerate() {
                    if let Some(&bad) = row.iter().find(|&&v| v > 1) {
                        return Err(IoError::Schema(format!(
                            "\"leq\" row {i} contains {bad}; entries must be 0 or 1"
                        )));
                    }
                    table.push(row.iter().map(|&v| v == 1).collect());
                }
                Ok(Poset::from_relation(&table)?)
            }
            (None, Some(covers)) => {
                let pairs: Vec<(usize, usize)> = covers.iter().map(|&[a, b]| (a, b)).collect();
                Ok(Poset::from_covers(self.n, &pairs)?)
            }
            _ => Err(IoError::Schema(
                "exactly one of \"leq\" and \"covers\" must be given".into(),
            )),
        }
    }

    /// Pretty JSON with one order-table row per line.
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        let _ = write!(out, "  \"n\": {}", self.n);
        if let Some(leq) = &self.leq {
            out.push_str(",\n  \"leq\": [\n");
            let rows: Vec<String> = leq
                .iter()
                .map(|r| format!("    {}", serde_json::to_string(r).expect("plain data")))
                .collect();
            out.push_str(&rows.join(",\n"));
            out.push_str("\n  ]");
        }
        if let Some(covers) = &self.covers {
            let _ = write!(out, ",\n  \"covers\": {}", serde_json::to_string(covers).expect("plain data"));
        }
        if let Some(p) = &self.permutation {
            let _ = write!(out, ",\n  \"permutation\": {}", serde_json::to_string(p).expect("plain data"));
        }
        out.push_str("\n}\n");
        out
    }
}

/// Parses and validates a lattice file.
pub fn parse_lattice(text: &str, limits: &Limits) -> Result<BuiltLattice, IoError> {
    let file: LatticeFile = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    Ok(build_lattice(&file.to_poset()?, limits)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongruenceFile {
    pub blocks: Vec<Vec<usize>>,
}

impl CongruenceFile {
    pub fn from_congruence(c: &Congruence) -> CongruenceFile {
        CongruenceFile { blocks: c.blocks() }
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"blocks\": {}}}\n",
            serde_json::to_string(&self.blocks).expect("plain data")
        )
    }
}

/// Parses a congruence file against the lattice it refers to.
pub fn parse_congruence(l: &Lattice, text: &str) -> Result<Congruence, IoError> {
    let file: CongruenceFile = serde_json::from_str(text).map_err(|e| json_error(text, e))?;
    Ok(Congruence::from_blocks(l, &file.blocks)?)
}

/// Hasse diagram, bottom at the bottom.
pub fn hasse_dot(l: &Lattice) -> String {
    let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=circle];\n");
    for a in l.elements() {
        let _ = writeln!(out, "  {a};");
    }
    for (a, b) in l.covers() {
        let _ = writeln!(out, "  {a} -> {b};");
    }
    out.push_str("}\n");
    out
}

/// The congruence frame as a Hasse diagram. Clear congruences are double
/// circles, closed ones are shaded. `labels[i]` names congruence `i`.
pub fn frame_dot(frame: &CongruenceFrame, labels: &[String]) -> String {
    let mut out = String::from("digraph congruences {\n  rankdir=BT;\n");
    for (i, (_, tags)) in frame.iter().enumerate() {
        let shape = if tags.clear { "doublecircle" } else { "circle" };
        let style = if tags.closed {
            ", style=filled, fillcolor=lightgray"
        } else {
            ""
        };
        let label = labels.get(i).map(String::as_str).unwrap_or("");
        let _ = writeln!(
            out,
            "  c{i} [shape={shape}{style}, label={}];",
            serde_json::to_string(label).expect("plain data")
        );
    }
    for (a, b) in frame.covers() {
        let _ = writeln!(out, "  c{a} -> c{b};");
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_form_is_relabeled() {
        let text = r#"{"n": 3, "covers": [[2, 0], [0, 1]]}"#;
        let built = parse_lattice(text, &Limits::default()).unwrap();
        assert_eq!(built.lattice.len(), 3);
        assert_eq!(built.permutation, vec![1, 2, 0]);
    }

    #[test]
    fn leq_form_round_trips() {
        let l = Lattice::boolean_algebra(2).unwrap();
        let text = LatticeFile::from_lattice(&l, None).to_json();
        let back = parse_lattice(&text, &Limits::default()).unwrap();
        assert_eq!(back.lattice, l);
        assert_eq!(back.permutation, vec![0, 1, 2, 3]);
    }

    #[test]
    fn malformed_json_reports_the_line() {
        let text = "{\n  \"n\": 2,\n  \"leq\": [[1,1] [0,1]]\n}";
        match parse_lattice(text, &Limits::default()) {
            Err(IoError::Json { line, context, .. }) => {
                assert_eq!(line, 3);
                assert!(context.contains("\"leq\""));
            }
            other => panic!("expected a JSON error, got {other:?}"),
        }
    }

    #[test]
    fn schema_errors() {
        let both = r#"{"n": 1, "leq": [[1]], "covers": []}"#;
        assert!(matches!(parse_lattice(both, &Limits::default()), Err(IoError::Schema(_))));
        let bad = r#"{"n": 1, "leq": [[2]]}"#;
        assert!(matches!(parse_lattice(bad, &Limits::default()), Err(IoError::Schema(_))));
        let unknown = r#"{"n": 1, "leq": [[1]], "extra": 0}"#;
        assert!(matches!(parse_lattice(unknown, &Limits::default()), Err(IoError::Json { .. })));
    }

    #[test]
    fn congruence_file() {
        let l = Lattice::chain(3).unwrap();
        let c = parse_congruence(&l, r#"{"blocks": [[0,1],[2]]}"#).unwrap();
        assert_eq!(CongruenceFile::from_congruence(&c).to_json(), "{\"blocks\": [[0,1],[2]]}\n");
        assert!(matches!(
            parse_congruence(&l, r#"{"blocks": [[0,2],[1]]}"#),
            Err(IoError::Congruence(CongruenceError::NotACongruence { .. }))
        ));
    }

    #[test]
    fn hasse_of_chain() {
        let dot = hasse_dot(&Lattice::chain(3).unwrap());
        assert!(dot.contains("0 -> 1;"));
        assert!(dot.contains("1 -> 2;"));
        assert!(!dot.contains("0 -> 2;"));
    }
}
