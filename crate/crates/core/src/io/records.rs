//! CSV carriers for forecasts, actuals, Monte-Carlo samples, return series
//! and benchmark comparisons, plus the JSON scenario/response-model files.
//!
//! | file        | header                                  |
//! |-------------|-----------------------------------------|
//! | forecasts   | `metric,period,unit,point[,mean,std]`   |
//! | actuals     | `metric,period,unit,value`              |
//! | MC samples  | `metric,period,sample_index,value`      |
//! | returns     | `period,value`                          |
//! | benchmark   | `metric,unit,benchmark,model`           |

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::canonical::canonical_number;
use crate::error::{Error, Result};
use crate::forecast::{ActualRecord, ForecastRecord, PredictiveDistribution};
use crate::scenario::{DriverSweep, ResponseModel, ScenarioSet, SummarySelector};

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes())
}

fn require_headers(rdr: &mut csv::Reader<&[u8]>, required: &[&str]) -> Result<()> {
    let headers = rdr.headers()?;
    for h in required {
        if !headers.iter().any(|x| x == *h) {
            return Err(Error::Schema(format!("missing CSV column '{h}'")));
        }
    }
    Ok(())
}

fn rows<T: for<'de> Deserialize<'de>>(text: &str, required: &[&str]) -> Result<Vec<T>> {
    let mut rdr = reader(text);
    require_headers(&mut rdr, required)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

fn finite(x: f64, line: usize, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::parse(
            Some(line as u64 + 2),
            format!("{what} is not finite"),
        ))
    }
}

#[derive(Debug, Deserialize)]
struct ForecastRow {
    metric: String,
    period: String,
    unit: String,
    point: f64,
    #[serde(default)]
    mean: Option<f64>,
    #[serde(default)]
    std: Option<f64>,
}

pub fn parse_forecasts(text: &str) -> Result<Vec<ForecastRecord>> {
    let raw: Vec<ForecastRow> = rows(text, &["metric", "period", "unit", "point"])?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            let rec = ForecastRecord::new(r.metric, r.period, r.unit, finite(r.point, i, "point")?);
            match (r.mean, r.std) {
                (None, None) => Ok(rec),
                (Some(mean), Some(std)) => {
                    let d = PredictiveDistribution::gaussian(mean, std)
                        .map_err(|e| Error::parse(Some(i as u64 + 2), e.to_string()))?;
                    rec.with_distribution(d, false)
                        .map_err(|e| Error::parse(Some(i as u64 + 2), e.to_string()))
                }
                _ => Err(Error::parse(
                    Some(i as u64 + 2),
                    "mean and std must be given together",
                )),
            }
        })
        .collect()
}

pub fn load_forecasts(spec: &str) -> Result<Vec<ForecastRecord>> {
    parse_forecasts(&super::read_source(spec)?)
}

pub fn forecasts_to_csv(records: &[ForecastRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "period", "unit", "point", "mean", "std"])?;
    for r in records {
        let (mean, std) = match &r.distribution {
            Some(PredictiveDistribution::Gaussian { mean, std }) => {
                (canonical_number(*mean), canonical_number(*std))
            }
            _ => (String::new(), String::new()),
        };
        w.write_record([
            &r.metric,
            &r.period,
            &r.unit,
            &canonical_number(r.point),
            &mean,
            &std,
        ])?;
    }
    finish(w)
}

#[derive(Debug, Deserialize)]
struct ActualRow {
    metric: String,
    period: String,
    unit: String,
    value: f64,
}

pub fn parse_actuals(text: &str) -> Result<Vec<ActualRecord>> {
    let raw: Vec<ActualRow> = rows(text, &["metric", "period", "unit", "value"])?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(ActualRecord::new(
                r.metric,
                r.period,
                r.unit,
                finite(r.value, i, "value")?,
            ))
        })
        .collect()
}

pub fn load_actuals(spec: &str) -> Result<Vec<ActualRecord>> {
    parse_actuals(&super::read_source(spec)?)
}

pub fn actuals_to_csv(records: &[ActualRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "period", "unit", "value"])?;
    for r in records {
        w.write_record([&r.metric, &r.period, &r.unit, &canonical_number(r.value)])?;
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleGroup {
    pub metric: String,
    pub period: String,
    /// Ordered by sample index.
    pub samples: Vec<f64>,
}

#[derive(Debug, Deserialize)]
struct SampleRow {
    metric: String,
    period: String,
    sample_index: u64,
    value: f64,
}

/// Group samples by `(metric, period)` in order of first appearance.
pub fn parse_samples(text: &str) -> Result<Vec<SampleGroup>> {
    let raw: Vec<SampleRow> = rows(text, &["metric", "period", "sample_index", "value"])?;
    let mut order: Vec<(String, String)> = Vec::new();
    let mut groups: BTreeMap<(String, String), Vec<(u64, f64)>> = BTreeMap::new();
    for (i, r) in raw.into_iter().enumerate() {
        let v = finite(r.value, i, "value")?;
        let key = (r.metric, r.period);
        let g = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Vec::new()
        });
        g.push((r.sample_index, v));
    }
    order
        .into_iter()
        .map(|key| {
            let mut g = groups.remove(&key).expect("grouped");
            g.sort_by_key(|(k, _)| *k);
            if g.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::Schema(format!(
                    "duplicate sample_index for {}/{}",
                    key.0, key.1
                )));
            }
            Ok(SampleGroup {
                metric: key.0,
                period: key.1,
                samples: g.into_iter().map(|(_, v)| v).collect(),
            })
        })
        .collect()
}

pub fn load_samples(spec: &str) -> Result<Vec<SampleGroup>> {
    parse_samples(&super::read_source(spec)?)
}

pub fn samples_to_csv(groups: &[SampleGroup]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["metric", "period", "sample_index", "value"])?;
    for g in groups {
        for (k, v) in g.samples.iter().enumerate() {
            w.write_record([&g.metric, &g.period, &k.to_string(), &canonical_number(*v)])?;
        }
    }
    finish(w)
}

#[derive(Debug, Deserialize)]
struct ReturnRow {
    #[allow(dead_code)]
    period: String,
    value: f64,
}

pub fn parse_returns(text: &str) -> Result<Vec<f64>> {
    let raw: Vec<ReturnRow> = rows(text, &["period", "value"])?;
    raw.into_iter()
        .enumerate()
        .map(|(i, r)| finite(r.value, i, "value"))
        .collect()
}

pub fn load_returns(spec: &str) -> Result<Vec<f64>> {
    parse_returns(&super::read_source(spec)?)
}

#[derive(Debug, Deserialize)]
struct BenchmarkRow {
    metric: String,
    unit: String,
    benchmark: f64,
    model: f64,
}

/// `(metric, unit, benchmark value, model value)` rows.
pub fn parse_benchmark(text: &str) -> Result<Vec<(String, String, f64, f64)>> {
    let raw: Vec<BenchmarkRow> = rows(text, &["metric", "unit", "benchmark", "model"])?;
    Ok(raw
        .into_iter()
        .map(|r| (r.metric, r.unit, r.benchmark, r.model))
        .collect())
}

pub fn load_benchmark(spec: &str) -> Result<Vec<(String, String, f64, f64)>> {
    parse_benchmark(&super::read_source(spec)?)
}

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w
        .into_inner()
        .map_err(|e| Error::parse(None, format!("csv writer: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::parse(None, e.to_string()))
}

/// Everything needed to reproduce a set of sensitivity tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioBundle {
    pub name: String,
    #[serde(default)]
    pub period: String,
    #[serde(default)]
    pub unit: String,
    pub base: BTreeMap<String, f64>,
    pub metrics: Vec<String>,
    pub sweeps: Vec<DriverSweep>,
    pub model: ResponseModel,
    /// Explicit summary-row picks, `driver -> metric -> driver value`.
    #[serde(default)]
    pub verbatim: BTreeMap<String, BTreeMap<String, f64>>,
}

impl ScenarioBundle {
    pub fn sweep(&self, driver: &str) -> Option<&DriverSweep> {
        self.sweeps.iter().find(|s| s.driver == driver)
    }

    pub fn verbatim_selector(&self) -> SummarySelector {
        SummarySelector::Verbatim(self.verbatim.clone())
    }
}

pub fn parse_scenario_bundle(text: &str) -> Result<ScenarioBundle> {
    let b: ScenarioBundle = serde_json::from_str(text)?;
    b.model.validate()?;
    for s in &b.sweeps {
        s.validate().map_err(|e| Error::Schema(e.to_string()))?;
    }
    Ok(b)
}

pub fn load_scenario_bundle(spec: &str) -> Result<ScenarioBundle> {
    parse_scenario_bundle(&super::read_source(spec)?)
}

/// A response model file: a JSON array of `{driver, metric, kind, ...}`.
pub fn parse_response_model(text: &str) -> Result<ResponseModel> {
    let m: ResponseModel = serde_json::from_str(text)?;
    m.validate()?;
    Ok(m)
}

pub fn parse_scenario_set(text: &str) -> Result<ScenarioSet> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_scenario_set(spec: &str) -> Result<ScenarioSet> {
    parse_scenario_set(&super::read_source(spec)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table4_fixtures() {
        let f = load_forecasts("fixtures:table4_pred.csv").unwrap();
        let a = load_actuals("fixtures:table4_actual.csv").unwrap();
        assert_eq!((f.len(), a.len()), (3, 3));
        assert_eq!(f[1].unit, "million TRY");
        assert!(f.iter().all(|r| r.distribution.is_some()));
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_forecasts("metric,period,unit,point\n")
            .unwrap()
            .is_empty());
        assert!(parse_actuals("metric,period,unit,value\n")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn non_numeric_reports_line() {
        let text = "metric,period,unit,value\nx,p,u,1\ny,p,u,abc\n";
        match parse_actuals(text) {
            Err(Error::Parse { line: Some(3), .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_column() {
        assert!(matches!(
            parse_actuals("metric,period,value\n"),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn samples_grouped_in_index_order() {
        let text = "metric,period,sample_index,value\nnp,q,1,2\nnp,q,0,1\nta,q,0,5\n";
        let g = parse_samples(text).unwrap();
        assert_eq!(g[0].samples, vec![1.0, 2.0]);
        assert_eq!(g[1].metric, "ta");
        assert!(parse_samples("metric,period,sample_index,value\nnp,q,0,2\nnp,q,0,1\n").is_err());
    }

    #[test]
    fn bundle_fixture() {
        let b = load_scenario_bundle("fixtures:paper-2024q2").unwrap();
        assert_eq!(b.sweeps.len(), 4);
        assert_eq!(b.model.entries().len(), 12);
        assert_eq!(b.base["net_profit"], 1600.0);
    }

    #[test]
    fn response_model_json() {
        let m = parse_response_model(
            r#"[{"driver":"inflation","metric":"np","kind":"linear","base":1600,"slope":20,"pivot":8},
                {"driver":"inflation","metric":"ta","kind":"lookup","knots":[[8,1],[10,2]]}]"#,
        )
        .unwrap();
        assert_eq!(m.entries().len(), 2);
        assert!(parse_response_model(r#"[{"driver":"d","metric":"m","kind":"cubic"}]"#).is_err());
    }
}
