//! One-driver-at-a-time sensitivity sweeps and scenario blocks.
//!
//! Responses come from a [`ResponseModel`]: per `(driver, metric)` either a
//! lookup table interpolated linearly between knots, or a linear elasticity.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ScenarioProvenance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriverSweep {
    pub driver: String,
    #[serde(default)]
    pub unit: String,
    pub values: Vec<f64>,
}

impl DriverSweep {
    pub fn new(
        driver: impl Into<String>,
        unit: impl Into<String>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let sweep = DriverSweep {
            driver: driver.into(),
            unit: unit.into(),
            values,
        };
        sweep.validate()?;
        Ok(sweep)
    }

    /// Values must be non-empty, finite and strictly monotone.
    pub fn validate(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidSweep(format!(
                "sweep for '{}' is empty",
                self.driver
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSweep(format!(
                "sweep for '{}' has non-finite values",
                self.driver
            )));
        }
        let up = self.values.windows(2).all(|w| w[0] < w[1]);
        let down = self.values.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(Error::InvalidSweep(format!(
                "sweep for '{}' is not strictly monotone",
                self.driver
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ResponseCurve {
    /// `(driver value, metric value)` knots, strictly increasing in the driver.
    Lookup { knots: Vec<(f64, f64)> },
    /// `base + slope * (x - pivot)`.
    Linear {
        base: f64,
        slope: f64,
        #[serde(default)]
        pivot: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Response {
    pub value: f64,
    pub extrapolated: bool,
}

impl ResponseCurve {
    fn validate(&self) -> Result<()> {
        match self {
            ResponseCurve::Lookup { knots } => {
                if knots.is_empty() {
                    return Err(Error::Schema("lookup response has no knots".into()));
                }
                if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
                    return Err(Error::Schema("lookup knot is not finite".into()));
                }
                if !knots.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(Error::Schema(
                        "lookup knots must be strictly increasing".into(),
                    ));
                }
            }
            ResponseCurve::Linear { base, slope, pivot } => {
                if !(base.is_finite() && slope.is_finite() && pivot.is_finite()) {
                    return Err(Error::Schema(
                        "linear response parameters must be finite".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Knot values are returned bit-exactly.
    pub fn eval(
        &self,
        x: f64,
        allow_extrapolate: bool,
    ) -> std::result::Result<Response, (f64, f64)> {
        match self {
            ResponseCurve::Linear { base, slope, pivot } => Ok(Response {
                value: base + slope * (x - pivot),
                extrapolated: false,
            }),
            ResponseCurve::Lookup { knots } => {
                let (lo, hi) = (knots[0].0, knots[knots.len() - 1].0);
                if let Some(&(_, y)) = knots.iter().find(|(kx, _)| *kx == x) {
                    return Ok(Response {
                        value: y,
                        extrapolated: false,
                    });
                }
                let outside = x < lo || x > hi;
                if outside && !allow_extrapolate {
                    return Err((lo, hi));
                }
                if knots.len() == 1 {
                    return Ok(Response {
                        value: knots[0].1,
                        extrapolated: outside,
                    });
                }
                // segment containing x, or the nearest end segment
                let k = knots
                    .partition_point(|(kx, _)| *kx < x)
                    .clamp(1, knots.len() - 1);
                let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
                Ok(Response {
                    value: y0 + (y1 - y0) * (x - x0) / (x1 - x0),
                    extrapolated: outside,
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseEntry {
    pub driver: String,
    pub metric: String,
    #[serde(flatten)]
    pub curve: ResponseCurve,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResponseModel {
    entries: Vec<ResponseEntry>,
}

impl ResponseModel {
    pub fn new(entries: Vec<ResponseEntry>) -> Result<Self> {
        let model = ResponseModel { entries };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.entries {
            e.curve.validate()?;
            if !seen.insert((e.driver.as_str(), e.metric.as_str())) {
                return Err(Error::Schema(format!(
                    "duplicate response for driver '{}' / metric '{}'",
                    e.driver, e.metric
                )));
            }
        }
        Ok(())
    }

    pub fn entries(&self) -> &[ResponseEntry] {
        &self.entries
    }

    pub fn curve(&self, driver: &str, metric: &str) -> Option<&ResponseCurve> {
        self.entries
            .iter()
            .find(|e| e.driver == driver && e.metric == metric)
            .map(|e| &e.curve)
    }

    /// Metrics covered for `driver`, in declaration order.
    pub fn metrics_for(&self, driver: &str) -> Vec<String> {
        self.entries
            .iter()
            .filter(|e| e.driver == driver)
            .map(|e| e.metric.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseRow {
    pub driver_value: f64,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub extrapolated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseTable {
    pub driver: String,
    pub unit: String,
    pub metrics: Vec<String>,
    pub rows: Vec<ResponseRow>,
}

/// Evaluate every metric at every sweep value, in sweep order.
pub fn run_sweep(
    model: &ResponseModel,
    sweep: &DriverSweep,
    metrics: &[String],
    allow_extrapolate: bool,
) -> Result<ResponseTable> {
    sweep.validate()?;
    let curves = metrics
        .iter()
        .map(|m| {
            model
                .curve(&sweep.driver, m)
                .ok_or_else(|| Error::UncoveredPair {
                    driver: sweep.driver.clone(),
                    metric: m.clone(),
                })
        })
        .collect::<Result<Vec<_>>>()?;

    let rows = sweep
        .values
        .iter()
        .map(|&x| {
            let mut extrapolated = false;
            let values = curves
                .iter()
                .map(|c| {
                    let r = c.eval(x, allow_extrapolate).map_err(|(lo, hi)| {
                        Error::ExtrapolationOutsideDomain {
                            driver: sweep.driver.clone(),
                            value: x,
                            lo,
                            hi,
                        }
                    })?;
                    extrapolated |= r.extrapolated;
                    Ok(r.value)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ResponseRow {
                driver_value: x,
                values,
                extrapolated,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ResponseTable {
        driver: sweep.driver.clone(),
        unit: sweep.unit.clone(),
        metrics: metrics.to_vec(),
        rows,
    })
}

/// Round half away from zero to `decimals` places.
pub fn round_half_away(x: f64, decimals: i32) -> f64 {
    let scale = 10f64.powi(decimals);
    (x * scale).round() / scale
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PercentChange {
    /// Unrounded `100 (v - base) / base`.
    pub raw: f64,
    /// Rounded to 2 decimals for display.
    pub rounded: f64,
}

impl PercentChange {
    /// `+4.38%`, `-5.00%`, `0.00%`.
    pub fn display(&self) -> String {
        let r = if self.rounded == 0.0 {
            0.0
        } else {
            self.rounded
        };
        if r > 0.0 {
            format!("+{r:.2}%")
        } else {
            format!("{r:.2}%")
        }
    }
}

pub fn percent_change(base: f64, v: f64) -> Result<PercentChange> {
    if base == 0.0 {
        return Err(Error::ZeroBase);
    }
    // multiply before dividing so exact cases (70 / 1600) stay exact
    let raw = 100.0 * (v - base) / base;
    Ok(PercentChange {
        raw,
        rounded: round_half_away(raw, 2),
    })
}

/// Which sweep row represents a driver in the summary.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "selector", content = "picks")]
pub enum SummarySelector {
    /// Row with the largest `|value - base|` per metric; first row wins ties.
    #[default]
    MaxAbsDelta,
    /// The last sweep value.
    Last,
    /// Explicit `driver -> metric -> driver value` picks.
    Verbatim(BTreeMap<String, BTreeMap<String, f64>>),
}

impl SummarySelector {
    pub fn name(&self) -> &'static str {
        match self {
            SummarySelector::MaxAbsDelta => "max-abs-delta",
            SummarySelector::Last => "last",
            SummarySelector::Verbatim(_) => "verbatim",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryCell {
    pub driver_value: f64,
    pub value: f64,
    pub change: PercentChange,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryColumn {
    pub driver: String,
    pub unit: String,
    pub range: (f64, f64),
    /// One cell per metric, in summary metric order.
    pub cells: Vec<SummaryCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivitySummary {
    pub selector: String,
    pub metrics: Vec<String>,
    pub base: Vec<f64>,
    pub columns: Vec<SummaryColumn>,
}

impl SensitivitySummary {
    pub fn cell(&self, driver: &str, metric: &str) -> Option<&SummaryCell> {
        let j = self.metrics.iter().position(|m| m == metric)?;
        self.columns
            .iter()
            .find(|c| c.driver == driver)
            .map(|c| &c.cells[j])
    }
}

pub fn summarize(
    tables: &[ResponseTable],
    base: &BTreeMap<String, f64>,
    selector: &SummarySelector,
) -> Result<SensitivitySummary> {
    let metrics = tables
        .first()
        .map(|t| t.metrics.clone())
        .ok_or(Error::EmptyInput)?;
    if let Some(t) = tables.iter().find(|t| t.metrics != metrics) {
        return Err(Error::MetricMismatch(format!(
            "table '{}' has metrics {:?}, expected {:?}",
            t.driver, t.metrics, metrics
        )));
    }
    let base_values = metrics
        .iter()
        .map(|m| {
            base.get(m)
                .copied()
                .ok_or_else(|| Error::MetricMismatch(format!("no base value for '{m}'")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut columns = Vec::with_capacity(tables.len());
    for t in tables {
        if t.rows.is_empty() {
            return Err(Error::InvalidSweep(format!(
                "table '{}' has no rows",
                t.driver
            )));
        }
        let mut cells = Vec::with_capacity(metrics.len());
        for (j, metric) in metrics.iter().enumerate() {
            let b = base_values[j];
            let row = match selector {
                SummarySelector::MaxAbsDelta => {
                    let mut best = &t.rows[0];
                    for r in &t.rows[1..] {
                        if (r.values[j] - b).abs() > (best.values[j] - b).abs() {
                            best = r;
                        }
                    }
                    best
                }
                SummarySelector::Last => t.rows.last().expect("non-empty"),
                SummarySelector::Verbatim(picks) => {
                    let x = picks
                        .get(&t.driver)
                        .and_then(|m| m.get(metric))
                        .ok_or_else(|| {
                            Error::MetricMismatch(format!(
                                "no verbatim pick for driver '{}' / metric '{metric}'",
                                t.driver
                            ))
                        })?;
                    t.rows
                        .iter()
                        .find(|r| r.driver_value == *x)
                        .ok_or_else(|| {
                            Error::InvalidSweep(format!(
                                "verbatim pick {x} is not a row of table '{}'",
                                t.driver
                            ))
                        })?
                }
            };
            cells.push(SummaryCell {
                driver_value: row.driver_value,
                value: row.values[j],
                change: percent_change(b, row.values[j])?,
            });
        }
        let xs = t.rows.iter().map(|r| r.driver_value);
        let range = (
            xs.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
        );
        columns.push(SummaryColumn {
            driver: t.driver.clone(),
            unit: t.unit.clone(),
            range,
            cells,
        });
    }

    Ok(SensitivitySummary {
        selector: selector.name().to_string(),
        metrics,
        base: base_values,
        columns,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricScenario {
    pub metric: String,
    #[serde(default)]
    pub unit: String,
    pub worst: f64,
    pub base: f64,
    pub best: f64,
}

/// Worst / base / best scenarios for several metrics of one period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSet {
    #[serde(default)]
    pub period: String,
    #[serde(default = "supplied")]
    pub provenance: ScenarioProvenance,
    pub metrics: Vec<MetricScenario>,
}

fn supplied() -> ScenarioProvenance {
    ScenarioProvenance::Supplied
}

/// Check `worst <= base <= best` for every metric.
pub fn scenario_report(set: &ScenarioSet) -> Result<&ScenarioSet> {
    for m in &set.metrics {
        if !(m.worst <= m.base && m.base <= m.best) {
            return Err(Error::OrderingViolation {
                metric: m.metric.clone(),
                worst: m.worst,
                base: m.base,
                best: m.best,
            });
        }
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lookup(knots: &[(f64, f64)]) -> ResponseCurve {
        ResponseCurve::Lookup {
            knots: knots.to_vec(),
        }
    }

    #[test]
    fn percent_change_examples() {
        assert_eq!(percent_change(1600.0, 1670.0).unwrap().display(), "+4.38%");
        assert_eq!(percent_change(123.0, 123.0).unwrap().display(), "0.00%");
        assert_eq!(
            percent_change(15150.0, 15300.0).unwrap().display(),
            "+0.99%"
        );
        assert_eq!(percent_change(1600.0, 1520.0).unwrap().display(), "-5.00%");
        assert_eq!(percent_change(1600.0, 1650.0).unwrap().display(), "+3.13%");
        assert!(matches!(percent_change(0.0, 1.0), Err(Error::ZeroBase)));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round_half_away(4.375, 2), 4.38);
        assert_eq!(round_half_away(-4.375, 2), -4.38);
        assert_eq!(round_half_away(3.125, 2), 3.13);
    }

    #[test]
    fn lookup_interpolation() {
        let c = lookup(&[(10.0, 1630.0), (12.0, 1670.0)]);
        assert_eq!(c.eval(11.0, false).unwrap().value, 1650.0);
        assert_eq!(c.eval(12.0, false).unwrap().value, 1670.0);
        assert_eq!(c.eval(13.0, false), Err((10.0, 12.0)));
        let r = c.eval(13.0, true).unwrap();
        assert!(r.extrapolated && r.value == 1690.0);
    }

    #[test]
    fn linear_curve() {
        let c = ResponseCurve::Linear {
            base: 100.0,
            slope: 2.0,
            pivot: 10.0,
        };
        assert_eq!(c.eval(12.0, false).unwrap().value, 104.0);
    }

    #[test]
    fn sweep_validation() {
        assert!(DriverSweep::new("x", "", vec![]).is_err());
        assert!(DriverSweep::new("x", "", vec![1.0, 1.0]).is_err());
        assert!(DriverSweep::new("x", "", vec![3.0, 2.0, 1.0]).is_ok());
    }

    #[test]
    fn constant_model_and_uncovered_pair() {
        let model = ResponseModel::new(vec![ResponseEntry {
            driver: "d".into(),
            metric: "m".into(),
            curve: ResponseCurve::Linear {
                base: 5.0,
                slope: 0.0,
                pivot: 0.0,
            },
        }])
        .unwrap();
        let sweep = DriverSweep::new("d", "", vec![1.0, 2.0, 3.0]).unwrap();
        let t = run_sweep(&model, &sweep, &["m".to_string()], false).unwrap();
        assert!(t.rows.iter().all(|r| r.values == vec![5.0]));
        assert!(matches!(
            run_sweep(&model, &sweep, &["other".to_string()], false),
            Err(Error::UncoveredPair { .. })
        ));
    }

    #[test]
    fn duplicate_entries_rejected() {
        let e = ResponseEntry {
            driver: "d".into(),
            metric: "m".into(),
            curve: lookup(&[(1.0, 1.0)]),
        };
        assert!(ResponseModel::new(vec![e.clone(), e]).is_err());
        let bad = ResponseEntry {
            driver: "d".into(),
            metric: "m".into(),
            curve: lookup(&[(2.0, 1.0), (1.0, 1.0)]),
        };
        assert!(ResponseModel::new(vec![bad]).is_err());
    }

    #[test]
    fn summary_all_equal_base() {
        let t = ResponseTable {
            driver: "d".into(),
            unit: String::new(),
            metrics: vec!["m".into()],
            rows: vec![
                ResponseRow {
                    driver_value: 1.0,
                    values: vec![10.0],
                    extrapolated: false,
                },
                ResponseRow {
                    driver_value: 2.0,
                    values: vec![10.0],
                    extrapolated: false,
                },
            ],
        };
        let base = BTreeMap::from([("m".to_string(), 10.0)]);
        let s = summarize(
            std::slice::from_ref(&t),
            &base,
            &SummarySelector::MaxAbsDelta,
        )
        .unwrap();
        assert_eq!(s.columns[0].cells[0].change.display(), "0.00%");
        assert_eq!(s.columns[0].cells[0].driver_value, 1.0);

        let mut other = t;
        other.metrics = vec!["n".into()];
        assert!(matches!(
            summarize(&[s_table(), other], &base, &SummarySelector::Last),
            Err(Error::MetricMismatch(_))
        ));
    }

    fn s_table() -> ResponseTable {
        ResponseTable {
            driver: "e".into(),
            unit: String::new(),
            metrics: vec!["m".into()],
            rows: vec![ResponseRow {
                driver_value: 0.0,
                values: vec![1.0],
                extrapolated: false,
            }],
        }
    }

    #[test]
    fn scenario_ordering() {
        let mk = |w, b, x| ScenarioSet {
            period: "2024-Q2".into(),
            provenance: ScenarioProvenance::Supplied,
            metrics: vec![MetricScenario {
                metric: "net_profit".into(),
                unit: "million TRY".into(),
                worst: w,
                base: b,
                best: x,
            }],
        };
        assert!(scenario_report(&mk(1400.0, 1600.0, 1750.0)).is_ok());
        assert!(scenario_report(&mk(5.0, 5.0, 5.0)).is_ok());
        assert!(matches!(
            scenario_report(&mk(1750.0, 1600.0, 1400.0)),
            Err(Error::OrderingViolation { .. })
        ));
    }
}
