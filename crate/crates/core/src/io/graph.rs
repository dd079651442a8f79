//! Firm graph weighted by trailing return correlation.
//!
//! Edge weight between two firms is the Pearson correlation of their last
//! `window` returns, multiplied by `1 + beta` when both firms share a sector.

use serde::Serialize;

use super::canonical::canonical_number;
use crate::error::{Error, Result};

pub const DEFAULT_SECTOR_BONUS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirmSeries {
    pub firm: String,
    pub sector: String,
    /// Chronological returns.
    pub returns: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FirmNode {
    pub id: String,
    pub sector: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub correlation: f64,
    pub weight: f64,
}

/// Undirected, self-loop free; edges stored once with `a < b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FirmGraph {
    pub nodes: Vec<FirmNode>,
    pub edges: Vec<Edge>,
}

impl FirmGraph {
    /// Weight between two nodes in either order; `None` on the diagonal.
    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.edges
            .iter()
            .find(|e| e.a == a && e.b == b)
            .map(|e| e.weight)
    }

    /// Edge list CSV `firm_a,firm_b,weight`.
    pub fn to_edge_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["firm_a", "firm_b", "weight"])?;
        for e in &self.edges {
            w.write_record([
                &self.nodes[e.a].id,
                &self.nodes[e.b].id,
                &canonical_number(e.weight),
            ])?;
        }
        super::records::finish(w)
    }
}

/// Pearson correlation; `None` if either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn build_correlation_graph(
    series: &[FirmSeries],
    window: usize,
    sector_bonus: f64,
) -> Result<FirmGraph> {
    if window < 2 {
        return Err(Error::InvalidSweep(format!(
            "correlation window must be at least 2, got {window}"
        )));
    }
    if !sector_bonus.is_finite() || sector_bonus < -1.0 {
        return Err(Error::BadWeights(format!(
            "sector bonus {sector_bonus} must be finite and >= -1"
        )));
    }
    let mut tails = Vec::with_capacity(series.len());
    for s in series {
        if s.returns.len() < window + 1 {
            return Err(Error::TooShortSeries {
                firm: s.firm.clone(),
                len: s.returns.len(),
                need: window + 1,
            });
        }
        if s.returns.iter().any(|r| !r.is_finite()) {
            return Err(Error::Schema(format!("non-finite return for '{}'", s.firm)));
        }
        let tail = &s.returns[s.returns.len() - window..];
        if tail.iter().all(|r| *r == tail[0]) {
            return Err(Error::ZeroVarianceSeries(s.firm.clone()));
        }
        tails.push(tail);
    }

    let mut edges = Vec::new();
    for a in 0..series.len() {
        for b in a + 1..series.len() {
            let r = pearson(tails[a], tails[b])
                .ok_or_else(|| Error::ZeroVarianceSeries(series[a].firm.clone()))?;
            let bonus = if series[a].sector == series[b].sector {
                1.0 + sector_bonus
            } else {
                1.0
            };
            edges.push(Edge {
                a,
                b,
                correlation: r,
                weight: r * bonus,
            });
        }
    }
    Ok(FirmGraph {
        nodes: series
            .iter()
            .map(|s| FirmNode {
                id: s.firm.clone(),
                sector: s.sector.clone(),
            })
            .collect(),
        edges,
    })
}

/// Long-format returns CSV `firm,sector,period,value`, rows chronological
/// within each firm. Firms keep their order of first appearance.
pub fn parse_returns_panel(text: &str) -> Result<Vec<FirmSeries>> {
    #[derive(serde::Deserialize)]
    struct Row {
        firm: String,
        sector: String,
        #[allow(dead_code)]
        period: String,
        value: f64,
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out: Vec<FirmSeries> = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row?;
        match out.iter_mut().find(|s| s.firm == row.firm) {
            Some(s) if s.sector != row.sector => {
                return Err(Error::Schema(format!(
                    "firm '{}' listed under two sectors",
                    row.firm
                )));
            }
            Some(s) => s.returns.push(row.value),
            None => out.push(FirmSeries {
                firm: row.firm,
                sector: row.sector,
                returns: vec![row.value],
            }),
        }
    }
    Ok(out)
}

pub fn load_returns_panel(spec: &str) -> Result<Vec<FirmSeries>> {
    parse_returns_panel(&super::read_source(spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn firm(id: &str, sector: &str, r: &[f64]) -> FirmSeries {
        FirmSeries {
            firm: id.into(),
            sector: sector.into(),
            returns: r.to_vec(),
        }
    }

    #[test]
    fn identical_and_negated() {
        let x = [0.3, 0.1, -0.2, 0.4, 0.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let g = build_correlation_graph(
            &[
                firm("a", "s1", &x),
                firm("b", "s2", &x),
                firm("c", "s3", &neg),
            ],
            4,
            0.5,
        )
        .unwrap();
        assert!((g.weight(0, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.weight(0, 2).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(g.weight(1, 0), g.weight(0, 1));
        assert_eq!(g.weight(1, 1), None);
    }

    #[test]
    fn hand_picked_half_correlation_same_sector() {
        // over the last 4 points: x = [1, -1, 0, 0], y = [1, 0, -1, 0] -> r = 0.5
        let g = build_correlation_graph(
            &[
                firm("a", "defense", &[9.0, 1.0, -1.0, 0.0, 0.0]),
                firm("b", "defense", &[9.0, 1.0, 0.0, -1.0, 0.0]),
            ],
            4,
            0.5,
        )
        .unwrap();
        assert!((g.edges[0].correlation - 0.5).abs() < 1e-12);
        assert!((g.edges[0].weight - 0.75).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        let short = firm("a", "s", &[0.1, 0.2, 0.3, 0.4]);
        assert!(matches!(
            build_correlation_graph(&[short], 4, 0.5),
            Err(Error::TooShortSeries { .. })
        ));
        let flat = firm("a", "s", &[0.5, 0.1, 0.1, 0.1, 0.1]);
        assert!(matches!(
            build_correlation_graph(&[flat], 4, 0.5),
            Err(Error::ZeroVarianceSeries(_))
        ));
    }

    #[test]
    fn demo_fixture() {
        let s = load_returns_panel("fixtures:returns_demo.csv").unwrap();
        assert_eq!(s.len(), 5);
        let g = build_correlation_graph(&s, 4, DEFAULT_SECTOR_BONUS).unwrap();
        assert_eq!(g.edges.len(), 10);
        let csv = g.to_edge_csv().unwrap();
        assert!(csv.starts_with("firm_a,firm_b,weight\n"));
    }
}
