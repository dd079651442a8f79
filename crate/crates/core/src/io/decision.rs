//! Decision-matrix and weight-vector JSON.
//!
//! ```json
//! {
//!   "alternatives": ["TabNet", "..."],
//!   "criteria": [{"id": "C1", "name": "Prediction Accuracy", "kind": "benefit"}],
//!   "cells": [[[{"mu": 0.92, "nu": 0.05}], "..."]],
//!   "weights": {"C1": 0.1209}
//! }
//! ```
//!
//! `cells[i][j]` is the hesitant set of alternative `i` under criterion `j`;
//! `weights` is optional.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{HesitantIfn, Ifn};
use crate::ranking::DecisionProblem;
use crate::weighting::{CriterionSpec, WeightVector};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCell {
    mu: f64,
    nu: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DecisionFile {
    alternatives: Vec<String>,
    criteria: Vec<CriterionSpec>,
    cells: Vec<Vec<Vec<RawCell>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<BTreeMap<String, f64>>,
}

pub fn parse_decision_matrix(text: &str) -> Result<DecisionProblem> {
    let file: DecisionFile = serde_json::from_str(text)?;
    if file.alternatives.is_empty() {
        return Err(Error::Schema("alternatives list is empty".into()));
    }
    if file.criteria.is_empty() {
        return Err(Error::Schema("criteria list is empty".into()));
    }
    if file.cells.len() != file.alternatives.len() {
        return Err(Error::Schema(format!(
            "{} alternatives but {} matrix rows",
            file.alternatives.len(),
            file.cells.len()
        )));
    }
    let mut cells = Vec::with_capacity(file.cells.len());
    for (i, row) in file.cells.into_iter().enumerate() {
        if row.len() != file.criteria.len() {
            return Err(Error::Schema(format!(
                "row {i} has {} cells, expected {}",
                row.len(),
                file.criteria.len()
            )));
        }
        let mut out = Vec::with_capacity(row.len());
        for (j, set) in row.into_iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Schema(format!("cell ({i}, {j}) is an empty set")));
            }
            let elements = set
                .into_iter()
                .map(|c| {
                    Ifn::new(c.mu, c.nu).map_err(|e| Error::InvalidIfn {
                        row: i,
                        column: j,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(HesitantIfn::new(elements)?);
        }
        cells.push(out);
    }
    let weights = match &file.weights {
        Some(map) => Some(weights_in_order(map, &file.criteria)?),
        None => None,
    };
    DecisionProblem::new(file.alternatives, file.criteria, cells, weights).map_err(|e| match e {
        Error::InvalidProblem(msg) => Error::Schema(msg),
        other => other,
    })
}

pub fn load_decision_matrix(spec: &str) -> Result<DecisionProblem> {
    parse_decision_matrix(&super::read_source(spec)?)
}

/// Canonical JSON form of a decision problem.
pub fn decision_matrix_to_json(problem: &DecisionProblem) -> Result<String> {
    let file = DecisionFile {
        alternatives: problem.alternatives().to_vec(),
        criteria: problem.criteria().to_vec(),
        cells: problem
            .cells()
            .iter()
            .map(|row| {
                row.iter()
                    .map(|h| {
                        h.elements()
                            .iter()
                            .map(|x| RawCell {
                                mu: x.mu(),
                                nu: x.nu(),
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect(),
        weights: None,
    };
    let mut value: serde_json::Value = serde_json::from_str(&super::to_canonical_json(&file)?)?;
    // normalized weights keep full precision so that reloading does not rescale them
    if let (Some(w), Some(obj)) = (problem.weights(), value.as_object_mut()) {
        obj.insert(
            "weights".into(),
            serde_json::to_value(weights_map(problem.criteria(), w))?,
        );
    }
    let mut s = serde_json::to_string_pretty(&value)?;
    s.push('\n');
    Ok(s)
}

/// `{criterion_id: weight}` as written in weight files.
pub fn parse_weights(text: &str) -> Result<BTreeMap<String, f64>> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_weights(spec: &str) -> Result<BTreeMap<String, f64>> {
    parse_weights(&super::read_source(spec)?)
}

/// Order a weight map by criterion and rescale it to sum to one.
pub fn weights_in_order(
    map: &BTreeMap<String, f64>,
    criteria: &[CriterionSpec],
) -> Result<WeightVector> {
    WeightVector::normalized(raw_weights_in_order(map, criteria)?)
}

/// Order a weight map by criterion without rescaling.
pub fn raw_weights_in_order(
    map: &BTreeMap<String, f64>,
    criteria: &[CriterionSpec],
) -> Result<Vec<f64>> {
    if map.len() != criteria.len() {
        return Err(Error::Schema(format!(
            "weight file has {} entries, problem has {} criteria",
            map.len(),
            criteria.len()
        )));
    }
    criteria
        .iter()
        .map(|c| {
            map.get(&c.id)
                .copied()
                .ok_or_else(|| Error::Schema(format!("no weight for criterion '{}'", c.id)))
        })
        .collect()
}

pub fn weights_map(criteria: &[CriterionSpec], w: &WeightVector) -> BTreeMap<String, f64> {
    criteria
        .iter()
        .zip(w.as_slice())
        .map(|(c, &w)| (c.id.clone(), w))
        .collect()
}

pub fn weights_to_json(criteria: &[CriterionSpec], w: &WeightVector) -> Result<String> {
    super::to_canonical_json(&weights_map(criteria, w))
}

/// Write a weight map as loaded, without rescaling.
pub fn weight_map_to_json(map: &BTreeMap<String, f64>) -> Result<String> {
    super::to_canonical_json(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table12_fixture() {
        let p = load_decision_matrix("fixtures:table12.json").unwrap();
        assert_eq!(p.alternatives().len(), 5);
        assert_eq!(p.criteria().len(), 9);
        assert!(p
            .criteria()
            .iter()
            .all(|c| c.kind == crate::weighting::CriterionKind::Benefit));
        assert!(p.weights().is_none());
    }

    #[test]
    fn invalid_cell_is_located() {
        let text = r#"{"alternatives":["a","b"],"criteria":[{"id":"C1","name":"x","kind":"benefit"}],
            "cells":[[[{"mu":0.5,"nu":0.2}]],[[{"mu":0.7,"nu":0.5}]]]}"#;
        match parse_decision_matrix(text) {
            Err(Error::InvalidIfn {
                row: 1, column: 0, ..
            }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors() {
        let empty = r#"{"alternatives":[],"criteria":[{"id":"C1","name":"x","kind":"benefit"}],"cells":[]}"#;
        assert!(matches!(
            parse_decision_matrix(empty),
            Err(Error::Schema(_))
        ));
        let ragged = r#"{"alternatives":["a","b"],"criteria":[{"id":"C1","name":"x","kind":"benefit"}],
            "cells":[[[{"mu":0.5,"nu":0.2}]],[]]}"#;
        assert!(matches!(
            parse_decision_matrix(ragged),
            Err(Error::Schema(_))
        ));
        let missing = r#"{"alternatives":["a","b"],"cells":[]}"#;
        assert!(matches!(
            parse_decision_matrix(missing),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            parse_decision_matrix("{"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            load_decision_matrix("/no/such/file.json"),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn published_weights_order_and_normalize() {
        let p = load_decision_matrix("fixtures:table12").unwrap();
        let map = load_weights("fixtures:weights_published").unwrap();
        let raw = raw_weights_in_order(&map, p.criteria()).unwrap();
        assert_eq!(raw[8], 0.1240);
        let w = weights_in_order(&map, p.criteria()).unwrap();
        assert!((w.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
