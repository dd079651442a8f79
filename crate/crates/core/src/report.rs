//! Human-readable tables and CSV renderings of pipeline results.
//!
//! Tables put units in headers and write intervals as `point ± half-width`.
//! JSON output goes through [`crate::io::to_canonical_json`] instead.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::Result;
use crate::forecast::EvaluationReport;
use crate::io::canonical::canonical_number;
use crate::io::graph::FirmGraph;
use crate::io::panel::FeatureTable;
use crate::io::records::finish;
use crate::ranking::RankingResult;
use crate::scenario::{ResponseTable, ScenarioSet, SensitivitySummary};
use crate::weighting::EntropyMeasure;

/// Thousands separators on the integer part: `15150` -> `15,150`.
pub fn group_thousands(x: f64, decimals: usize) -> String {
    let s = format!("{:.*}", decimals, x.abs());
    let (int, frac) = s
        .split_once('.')
        .map_or((s.as_str(), None), |(i, f)| (i, Some(f)));
    let mut out = String::new();
    for (k, ch) in int.chars().enumerate() {
        if k > 0 && (int.len() - k) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    if let Some(f) = frac {
        out.push('.');
        out.push_str(f);
    }
    if x < 0.0 && s.chars().any(|c| c.is_ascii_digit() && c != '0') {
        out.insert(0, '-');
    }
    out
}

/// Fixed-width text table; first column left-aligned, the rest right-aligned.
fn table(header: &[String], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut width = header.iter().map(|h| h.chars().count()).collect::<Vec<_>>();
    for r in rows {
        for (j, c) in r.iter().enumerate().take(cols) {
            width[j] = width[j].max(c.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let mut s = String::new();
        for (j, c) in cells.iter().enumerate() {
            if j > 0 {
                s.push_str("  ");
            }
            let pad = width[j] - c.chars().count();
            if j == 0 {
                s.push_str(c);
                s.push_str(&" ".repeat(pad));
            } else {
                s.push_str(&" ".repeat(pad));
                s.push_str(c);
            }
        }
        s.trim_end().to_string()
    };
    let mut out = line(header);
    out.push('\n');
    out.push_str(&"-".repeat(width.iter().sum::<usize>() + 2 * (cols - 1)));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn csv_of(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    finish(w)
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

// ---------------------------------------------------------------- ranking

pub fn ranking_table(r: &RankingResult) -> String {
    let mut out = String::new();
    let source = match (&r.weight_source, r.entropy_measure) {
        (crate::ranking::WeightSource::Entropy, Some(m)) => format!("entropy ({m})"),
        _ => "supplied".to_string(),
    };
    let _ = writeln!(out, "Criterion weights [{source}]");
    let rows: Vec<Vec<String>> = r
        .criteria
        .iter()
        .zip(r.weights.as_slice())
        .map(|(c, w)| vec![c.clone(), format!("{w:.4}")])
        .collect();
    out.push_str(&table(&strings(&["Criterion", "w_j"]), &rows));
    let _ = writeln!(out, "\nEDAS variant: {}", r.edas.variant);
    let rows: Vec<Vec<String>> = r
        .marcos
        .order
        .iter()
        .map(|&i| {
            vec![
                r.alternatives[i].clone(),
                format!("{:.4}", r.edas.pdas[i]),
                format!("{:.4}", r.edas.ndas[i]),
                format!("{:.3}", r.edas.s[i]),
                format!("{:.3}", r.marcos.u[i]),
                r.marcos.ranks[i].to_string(),
            ]
        })
        .collect();
    out.push_str(&table(
        &strings(&["Alternative", "PDAS", "NDAS", "S_i", "U_i", "Rank"]),
        &rows,
    ));
    let _ = writeln!(
        out,
        "\nI* = {:.4}, I- = {:.4}",
        r.marcos.i_star, r.marcos.i_minus
    );
    out
}

pub fn ranking_csv(r: &RankingResult) -> Result<String> {
    let rows: Vec<Vec<String>> = (0..r.alternatives.len())
        .map(|i| {
            vec![
                r.alternatives[i].clone(),
                canonical_number(r.edas.pdas[i]),
                canonical_number(r.edas.ndas[i]),
                canonical_number(r.edas.s[i]),
                canonical_number(r.marcos.k_plus[i]),
                canonical_number(r.marcos.k_minus[i]),
                canonical_number(r.marcos.u[i]),
                r.marcos.ranks[i].to_string(),
            ]
        })
        .collect();
    csv_of(
        &[
            "alternative",
            "pdas",
            "ndas",
            "s",
            "k_plus",
            "k_minus",
            "u",
            "rank",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------- weights

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureWeights {
    pub measure: EntropyMeasure,
    pub entropies: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightsReport {
    pub criteria: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<f64>>,
    pub measures: Vec<MeasureWeights>,
}

pub fn weights_table(r: &WeightsReport) -> String {
    let mut out = String::new();
    for m in &r.measures {
        let _ = writeln!(out, "Entropy measure: {}", m.measure);
        let mut header = strings(&["Criterion", "E_j", "w_j"]);
        if r.reference.is_some() {
            header.extend(strings(&["reference", "deviation"]));
        }
        let rows: Vec<Vec<String>> = r
            .criteria
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let mut row = vec![
                    c.clone(),
                    format!("{:.4}", m.entropies[j]),
                    format!("{:.4}", m.weights[j]),
                ];
                if let Some(reference) = &r.reference {
                    row.push(format!("{:.4}", reference[j]));
                    row.push(format!("{:+.4}", m.weights[j] - reference[j]));
                }
                row
            })
            .collect();
        out.push_str(&table(&header, &rows));
        if let Some(d) = m.max_abs_deviation {
            let _ = writeln!(out, "max |deviation| = {d:.4}");
        }
        out.push('\n');
    }
    out
}

pub fn weights_csv(r: &WeightsReport) -> Result<String> {
    let mut rows = Vec::new();
    for m in &r.measures {
        for (j, c) in r.criteria.iter().enumerate() {
            let reference = r
                .reference
                .as_ref()
                .map(|v| canonical_number(v[j]))
                .unwrap_or_default();
            let dev = r
                .reference
                .as_ref()
                .map(|v| canonical_number(m.weights[j] - v[j]))
                .unwrap_or_default();
            rows.push(vec![
                m.measure.to_string(),
                c.clone(),
                canonical_number(m.entropies[j]),
                canonical_number(m.weights[j]),
                reference,
                dev,
            ]);
        }
    }
    csv_of(
        &[
            "measure",
            "criterion",
            "entropy",
            "weight",
            "reference",
            "deviation",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------- evaluation

pub fn evaluation_table(r: &EvaluationReport) -> String {
    let mut out = String::new();
    let pct = format!("{}%", group_thousands(r.level * 100.0, 0));
    let unit = r
        .metrics
        .first()
        .map(|m| m.unit.clone())
        .unwrap_or_default();
    let header = vec![
        "Metric".to_string(),
        format!("Predicted ({unit})"),
        format!("Actual ({unit})"),
        format!("MAE ({unit})"),
        "MAPE (%)".to_string(),
        format!("{pct} Interval"),
        "Covered".to_string(),
        format!("VaR {pct}"),
    ];
    let rows: Vec<Vec<String>> = r
        .metrics
        .iter()
        .map(|m| {
            let interval = m.interval.map_or("-".to_string(), |(lo, hi)| {
                format!(
                    "{} ± {}",
                    group_thousands((lo + hi) / 2.0, 0),
                    group_thousands((hi - lo) / 2.0, 0)
                )
            });
            vec![
                m.metric.clone(),
                group_thousands(m.point, 0),
                m.actual.map_or("-".into(), |a| group_thousands(a, 0)),
                m.mae.map_or("-".into(), |e| group_thousands(e, 0)),
                m.mape.map_or("-".into(), |e| format!("{e:.2}%")),
                interval,
                m.covered
                    .map_or("-".into(), |c| if c { "yes".into() } else { "no".into() }),
                m.value_at_risk
                    .map_or("-".into(), |v| group_thousands(v, 1)),
            ]
        })
        .collect();
    out.push_str(&table(&header, &rows));
    if let Some(o) = r.overall {
        let _ = writeln!(out, "\nOverall MAE = {:.2}, MAPE = {:.2}%", o.mae, o.mape);
    }
    if let Some(c) = r.coverage {
        let _ = writeln!(out, "Interval coverage at {pct}: {c:.4}");
    }
    if r.metrics.iter().any(|m| m.scenarios.is_some()) {
        out.push_str("\nDerived scenarios (10th / 50th / 90th percentile)\n");
        let rows: Vec<Vec<String>> = r
            .metrics
            .iter()
            .filter_map(|m| {
                m.scenarios.as_ref().map(|s| {
                    vec![
                        m.metric.clone(),
                        group_thousands(s.worst, 1),
                        group_thousands(s.base, 1),
                        group_thousands(s.best, 1),
                    ]
                })
            })
            .collect();
        out.push_str(&table(
            &strings(&["Metric", "Worst", "Base", "Best"]),
            &rows,
        ));
    }
    if let Some(ra) = &r.risk_adjusted {
        let _ = writeln!(
            out,
            "\nSharpe = {:.4}, Sortino = {:.4} (rf = {}, target = {})",
            ra.sharpe, ra.sortino, ra.risk_free, ra.target
        );
    }
    if !r.benchmark.is_empty() {
        out.push_str("\nBenchmark comparison\n");
        let rows: Vec<Vec<String>> = r
            .benchmark
            .iter()
            .map(|b| {
                vec![
                    b.metric.clone(),
                    b.unit.clone(),
                    canonical_number(b.benchmark),
                    canonical_number(b.model),
                    format!("{:+.1}%", b.improvement_pct),
                ]
            })
            .collect();
        out.push_str(&table(
            &strings(&["Metric", "Unit", "Benchmark", "Model", "Change"]),
            &rows,
        ));
    }
    out
}

pub fn evaluation_csv(r: &EvaluationReport) -> Result<String> {
    let opt = |v: Option<f64>| v.map(canonical_number).unwrap_or_default();
    let rows: Vec<Vec<String>> = r
        .metrics
        .iter()
        .map(|m| {
            vec![
                m.metric.clone(),
                m.period.clone(),
                m.unit.clone(),
                canonical_number(m.point),
                opt(m.actual),
                opt(m.mae),
                opt(m.mape),
                opt(m.interval.map(|i| i.0)),
                opt(m.interval.map(|i| i.1)),
                m.covered.map(|c| c.to_string()).unwrap_or_default(),
                opt(m.value_at_risk),
            ]
        })
        .collect();
    csv_of(
        &[
            "metric", "period", "unit", "point", "actual", "mae", "mape", "lo", "hi", "covered",
            "var",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------- sensitivity

pub fn response_table_text(t: &ResponseTable, unit: &str) -> String {
    let mut header = vec![if t.unit.is_empty() {
        t.driver.clone()
    } else {
        format!("{} ({})", t.driver, t.unit)
    }];
    header.extend(t.metrics.iter().map(|m| format!("{m} ({unit})")));
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![format!(
                "{}{}",
                r.driver_value,
                if r.extrapolated { " *" } else { "" }
            )];
            row.extend(r.values.iter().map(|v| group_thousands(*v, 0)));
            row
        })
        .collect();
    let mut out = table(&header, &rows);
    if t.rows.iter().any(|r| r.extrapolated) {
        out.push_str("* extrapolated beyond the lookup domain\n");
    }
    out
}

pub fn response_table_csv(t: &ResponseTable) -> Result<String> {
    let mut header = vec!["driver".to_string(), "driver_value".to_string()];
    header.extend(t.metrics.iter().cloned());
    header.push("extrapolated".into());
    let rows: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![t.driver.clone(), canonical_number(r.driver_value)];
            row.extend(r.values.iter().map(|v| canonical_number(*v)));
            row.push(r.extrapolated.to_string());
            row
        })
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_of(&header, &rows)
}

pub fn summary_table(s: &SensitivitySummary, unit: &str) -> String {
    let mut header = vec![String::new(), "Base Case".to_string()];
    header.extend(
        s.columns
            .iter()
            .map(|c| format!("{} ({}-{})", c.driver, c.range.0, c.range.1)),
    );
    let rows: Vec<Vec<String>> = s
        .metrics
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let mut row = vec![format!("{m} ({unit})"), group_thousands(s.base[j], 0)];
            row.extend(s.columns.iter().map(|c| {
                format!(
                    "{} ({})",
                    group_thousands(c.cells[j].value, 0),
                    c.cells[j].change.display()
                )
            }));
            row
        })
        .collect();
    let mut out = format!("Summary row selector: {}\n", s.selector);
    out.push_str(&table(&header, &rows));
    out
}

pub fn summary_csv(s: &SensitivitySummary) -> Result<String> {
    let mut rows = Vec::new();
    for c in &s.columns {
        for (j, m) in s.metrics.iter().enumerate() {
            let cell = &c.cells[j];
            rows.push(vec![
                c.driver.clone(),
                m.clone(),
                canonical_number(s.base[j]),
                canonical_number(cell.driver_value),
                canonical_number(cell.value),
                canonical_number(cell.change.raw),
                cell.change.display(),
            ]);
        }
    }
    csv_of(
        &[
            "driver",
            "metric",
            "base",
            "driver_value",
            "value",
            "pct_change",
            "pct_display",
        ],
        &rows,
    )
}

// ---------------------------------------------------------------- scenarios

pub fn scenario_block(set: &ScenarioSet) -> String {
    let provenance = match set.provenance {
        crate::forecast::ScenarioProvenance::Supplied => "supplied by model output",
        crate::forecast::ScenarioProvenance::Derived => "derived from 10th/50th/90th percentiles",
    };
    let mut out = format!("Risk-aware scenarios {} [{provenance}]\n", set.period)
        .trim_start()
        .to_string();
    let mut rows = Vec::new();
    for (label, pick) in [("Best-case", 2usize), ("Base-case", 1), ("Worst-case", 0)] {
        for m in &set.metrics {
            let v = [m.worst, m.base, m.best][pick];
            let unit = if m.unit.is_empty() {
                String::new()
            } else {
                format!(" ({})", m.unit)
            };
            rows.push(vec![
                format!("{label} Scenario - {}{unit}", m.metric),
                group_thousands(v, 0),
            ]);
        }
    }
    out = out.replace("scenarios  [", "scenarios [");
    out.push_str(&table(&strings(&["Scenario", "Value"]), &rows));
    out
}

pub fn scenario_csv(set: &ScenarioSet) -> Result<String> {
    let rows: Vec<Vec<String>> = set
        .metrics
        .iter()
        .map(|m| {
            vec![
                m.metric.clone(),
                m.unit.clone(),
                canonical_number(m.worst),
                canonical_number(m.base),
                canonical_number(m.best),
            ]
        })
        .collect();
    csv_of(&["metric", "unit", "worst", "base", "best"], &rows)
}

// ---------------------------------------------------------------- graph

pub fn graph_table(g: &FirmGraph) -> String {
    let rows: Vec<Vec<String>> = g
        .edges
        .iter()
        .map(|e| {
            vec![
                g.nodes[e.a].id.clone(),
                g.nodes[e.b].id.clone(),
                format!("{:.4}", e.correlation),
                format!("{:.4}", e.weight),
            ]
        })
        .collect();
    table(
        &strings(&["Firm A", "Firm B", "Correlation", "Weight"]),
        &rows,
    )
}

// ---------------------------------------------------------------- panel

pub fn panel_table(t: &FeatureTable) -> String {
    let mut header = strings(&["entity", "period"]);
    header.extend(t.columns().iter().map(|c| c.header()));
    let rows: Vec<Vec<String>> = t
        .ids()
        .iter()
        .zip(t.rows())
        .map(|(id, row)| {
            let mut r = vec![id.entity.clone(), id.period.clone()];
            r.extend(
                row.iter()
                    .map(|v| v.map_or("NA".to_string(), |x| format!("{x:.4}"))),
            );
            r
        })
        .collect();
    table(&header, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thousands() {
        assert_eq!(group_thousands(15150.0, 0), "15,150");
        assert_eq!(group_thousands(1600.0, 0), "1,600");
        assert_eq!(group_thousands(-1234567.891, 2), "-1,234,567.89");
        assert_eq!(group_thousands(12.0, 0), "12");
        assert_eq!(group_thousands(-0.0001, 1), "0.0");
    }

    #[test]
    fn table_alignment() {
        let t = table(&strings(&["a", "bb"]), &[strings(&["xyz", "1"])]);
        assert_eq!(t, "a    bb\n-------\nxyz   1\n");
    }
}
