//! Risk-aware evaluation of probabilistic forecasts.
//!
//! A forecast carries a point value and optionally a predictive distribution,
//! either Gaussian (`mean`, `std`) or empirical (a sample set, e.g. Monte
//! Carlo dropout passes). Empirical quantiles use linear interpolation between
//! order statistics (the "type 7" rule).

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal as NormalSampler};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Two-sided 95% standard-normal quantile.
pub const Z_95: f64 = 1.959964;
/// One-sided 95% (two-sided 90%) standard-normal quantile.
pub const Z_90: f64 = 1.644854;
/// One-sided 90% (two-sided 80%) standard-normal quantile.
pub const Z_80: f64 = 1.281552;

/// Tolerance between a record's point value and its Gaussian mean.
pub const POINT_MEAN_TOLERANCE: f64 = 1e-9;

/// Standard-normal quantile `Phi^-1(p)`.
///
/// The common probabilities resolve to the fixed 6-decimal constants so
/// golden outputs do not depend on the inverse-CDF routine.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::BadLevel(p));
    }
    const TABLE: [(f64, f64); 6] = [
        (0.975, Z_95),
        (0.025, -Z_95),
        (0.95, Z_90),
        (0.05, -Z_90),
        (0.90, Z_80),
        (0.10, -Z_80),
    ];
    if let Some(&(_, z)) = TABLE.iter().find(|(q, _)| (q - p).abs() < 1e-12) {
        return Ok(z);
    }
    if (p - 0.5).abs() < 1e-15 {
        return Ok(0.0);
    }
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    Ok(std_normal.inverse_cdf(p))
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::BadLevel(level))
    }
}

/// Sample quantile with linear interpolation; `sorted` must be ascending.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation with the `n - 1` denominator.
pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
pub enum PredictiveDistribution {
    Gaussian { mean: f64, std: f64 },
    Empirical { samples: Vec<f64> },
}

impl PredictiveDistribution {
    pub fn gaussian(mean: f64, std: f64) -> Result<Self> {
        if !mean.is_finite() || !std.is_finite() || std < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "mean {mean}, std {std}"
            )));
        }
        Ok(PredictiveDistribution::Gaussian { mean, std })
    }

    /// Gaussian whose two-sided `level` interval is `mean ± half_width`.
    pub fn from_half_width(mean: f64, half_width: f64, level: f64) -> Result<Self> {
        check_level(level)?;
        let z = normal_quantile((1.0 + level) / 2.0)?;
        Self::gaussian(mean, half_width / z)
    }

    /// Empirical distribution; samples are stored sorted.
    pub fn empirical(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution("empty sample set".into()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidDistribution("non-finite sample".into()));
        }
        samples.sort_by(f64::total_cmp);
        Ok(PredictiveDistribution::Empirical { samples })
    }

    pub fn mean(&self) -> f64 {
        match self {
            PredictiveDistribution::Gaussian { mean, .. } => *mean,
            PredictiveDistribution::Empirical { samples } => mean(samples),
        }
    }

    /// Lower-tail quantile at probability `p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        match self {
            PredictiveDistribution::Gaussian { mean, std } => {
                if *std == 0.0 {
                    check_level(p)?;
                    return Ok(*mean);
                }
                Ok(mean + normal_quantile(p)? * std)
            }
            PredictiveDistribution::Empirical { samples } => {
                check_level(p)?;
                Ok(quantile_sorted(samples, p))
            }
        }
    }

    /// Draw `n` values from this distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        match self {
            PredictiveDistribution::Gaussian { mean, std } => {
                let d = NormalSampler::new(*mean, *std).expect("validated std");
                (0..n).map(|_| d.sample(rng)).collect()
            }
            PredictiveDistribution::Empirical { samples } => (0..n)
                .map(|_| samples[rng.random_range(0..samples.len())])
                .collect(),
        }
    }
}

/// Two-sided `level` interval.
pub fn confidence_interval(d: &PredictiveDistribution, level: f64) -> Result<(f64, f64)> {
    check_level(level)?;
    match d {
        PredictiveDistribution::Gaussian { mean, std } => {
            let z = normal_quantile((1.0 + level) / 2.0)?;
            Ok((mean - z * std, mean + z * std))
        }
        PredictiveDistribution::Empirical { samples } => Ok((
            quantile_sorted(samples, snap((1.0 - level) / 2.0)),
            quantile_sorted(samples, snap((1.0 + level) / 2.0)),
        )),
    }
}

/// Remove the last-bit noise of `(1 +- level) / 2` so that e.g. level 0.8
/// gives exactly the 0.1 and 0.9 quantiles.
fn snap(p: f64) -> f64 {
    (p * 1e12).round() / 1e12
}

/// Collapse Monte-Carlo forward-pass outputs to a Gaussian predictive
/// distribution (sample mean, `n - 1` standard deviation).
pub fn aggregate_mc_samples(samples: &[f64]) -> Result<PredictiveDistribution> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidDistribution("non-finite sample".into()));
    }
    PredictiveDistribution::gaussian(mean(samples), sample_std(samples))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScenarioProvenance {
    /// Taken verbatim from model output.
    Supplied,
    /// 10th / 50th / 90th percentiles of a predictive distribution.
    Derived,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioTriple {
    pub worst: f64,
    pub base: f64,
    pub best: f64,
    pub provenance: ScenarioProvenance,
}

/// Worst / base / best scenarios at the 10th, 50th and 90th percentiles.
/// Gaussian bases use the mean, empirical bases the median.
pub fn quantile_scenarios(d: &PredictiveDistribution) -> ScenarioTriple {
    let (worst, base, best) = match d {
        PredictiveDistribution::Gaussian { mean, std } => {
            (mean - Z_80 * std, *mean, mean + Z_80 * std)
        }
        PredictiveDistribution::Empirical { samples } => (
            quantile_sorted(samples, 0.1),
            quantile_sorted(samples, 0.5),
            quantile_sorted(samples, 0.9),
        ),
    };
    ScenarioTriple {
        worst,
        base,
        best,
        provenance: ScenarioProvenance::Derived,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorMetrics {
    pub mae: f64,
    /// Percent.
    pub mape: f64,
}

/// MAE and MAPE (percent, actual value as denominator) over
/// `(forecast, actual)` pairs.
pub fn error_metrics(pairs: &[(f64, f64)]) -> Result<ErrorMetrics> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    if pairs.iter().any(|(_, a)| *a == 0.0) {
        return Err(Error::ZeroActual);
    }
    let n = pairs.len() as f64;
    let mae = pairs.iter().map(|(f, a)| (a - f).abs()).sum::<f64>() / n;
    let mape = pairs
        .iter()
        .map(|(f, a)| (a - f).abs() / a.abs())
        .sum::<f64>()
        / n
        * 100.0;
    Ok(ErrorMetrics { mae, mape })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum VarBaseline {
    Mean,
    Point(f64),
}

/// Value at Risk: `baseline - q_{1 - level}`.
pub fn value_at_risk(d: &PredictiveDistribution, level: f64, baseline: VarBaseline) -> Result<f64> {
    check_level(level)?;
    let q = d.quantile(1.0 - level)?;
    let base = match baseline {
        VarBaseline::Mean => d.mean(),
        VarBaseline::Point(v) => v,
    };
    Ok(base - q)
}

/// `(mean(r) - rf) / std(r)` with the `n - 1` standard deviation.
pub fn sharpe(returns: &[f64], rf: f64) -> Result<f64> {
    if returns.len() < 2 {
        return Err(Error::TooFewSamples(returns.len()));
    }
    if returns.iter().all(|r| *r == returns[0]) {
        return Err(Error::ZeroDispersion);
    }
    let sd = sample_std(returns);
    if !sd.is_finite() {
        return Err(Error::ZeroDispersion);
    }
    Ok((mean(returns) - rf) / sd)
}

/// Downside deviation `sqrt(mean(min(0, r - target)^2))` over all returns.
pub fn downside_deviation(returns: &[f64], target: f64) -> f64 {
    let ss: f64 = returns.iter().map(|r| (r - target).min(0.0).powi(2)).sum();
    (ss / returns.len() as f64).sqrt()
}

/// `(mean(r) - rf) / downside_deviation(r, target)`.
pub fn sortino(returns: &[f64], rf: f64, target: f64) -> Result<f64> {
    if returns.len() < 2 {
        return Err(Error::TooFewSamples(returns.len()));
    }
    if !returns.iter().any(|r| *r < target) {
        return Err(Error::NoDownside);
    }
    Ok((mean(returns) - rf) / downside_deviation(returns, target))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub metric: String,
    pub period: String,
    pub unit: String,
    pub point: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distribution: Option<PredictiveDistribution>,
    /// Input features, e.g. `sentiment` in `[-1, 1]`.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub features: BTreeMap<String, f64>,
}

impl ForecastRecord {
    pub fn new(
        metric: impl Into<String>,
        period: impl Into<String>,
        unit: impl Into<String>,
        point: f64,
    ) -> Self {
        ForecastRecord {
            metric: metric.into(),
            period: period.into(),
            unit: unit.into(),
            point,
            distribution: None,
            features: BTreeMap::new(),
        }
    }

    /// Attach a distribution. A Gaussian mean must agree with the point value
    /// unless `override_point` is set.
    pub fn with_distribution(
        mut self,
        d: PredictiveDistribution,
        override_point: bool,
    ) -> Result<Self> {
        if let PredictiveDistribution::Gaussian { mean, .. } = d {
            if !override_point && (mean - self.point).abs() > POINT_MEAN_TOLERANCE {
                return Err(Error::InvalidDistribution(format!(
                    "{}/{}: point {} differs from mean {mean}",
                    self.metric, self.period, self.point
                )));
            }
        }
        self.distribution = Some(d);
        Ok(self)
    }

    pub fn key(&self) -> (&str, &str) {
        (&self.metric, &self.period)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActualRecord {
    pub metric: String,
    pub period: String,
    pub unit: String,
    pub value: f64,
}

impl ActualRecord {
    pub fn new(
        metric: impl Into<String>,
        period: impl Into<String>,
        unit: impl Into<String>,
        value: f64,
    ) -> Self {
        ActualRecord {
            metric: metric.into(),
            period: period.into(),
            unit: unit.into(),
            value,
        }
    }
}

/// Match forecasts to actuals by `(metric, period)`; forecast order is kept.
pub fn pair_records<'a>(
    forecasts: &'a [ForecastRecord],
    actuals: &'a [ActualRecord],
) -> Result<Vec<(&'a ForecastRecord, &'a ActualRecord)>> {
    let mut by_key: BTreeMap<(&str, &str), &ActualRecord> = BTreeMap::new();
    for a in actuals {
        if by_key.insert((&a.metric, &a.period), a).is_some() {
            return Err(Error::Pairing(format!(
                "duplicate actual for {}/{}",
                a.metric, a.period
            )));
        }
    }
    let mut pairs = Vec::with_capacity(forecasts.len());
    for f in forecasts {
        let a = by_key
            .remove(&f.key())
            .ok_or_else(|| Error::Pairing(format!("no actual for {}/{}", f.metric, f.period)))?;
        if a.unit != f.unit {
            return Err(Error::UnitMismatch {
                metric: f.metric.clone(),
                period: f.period.clone(),
                forecast: f.unit.clone(),
                actual: a.unit.clone(),
            });
        }
        pairs.push((f, a));
    }
    if let Some(((m, p), _)) = by_key.into_iter().next() {
        return Err(Error::Pairing(format!("no forecast for {m}/{p}")));
    }
    Ok(pairs)
}

/// Fraction of actuals inside their forecast's `level` interval.
/// Endpoints count as covered.
pub fn coverage(pairs: &[(&ForecastRecord, &ActualRecord)], level: f64) -> Result<f64> {
    check_level(level)?;
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut hit = 0usize;
    for (f, a) in pairs {
        let d = f
            .distribution
            .as_ref()
            .ok_or_else(|| Error::MissingDistribution {
                metric: f.metric.clone(),
                period: f.period.clone(),
            })?;
        let (lo, hi) = confidence_interval(d, level)?;
        if lo <= a.value && a.value <= hi {
            hit += 1;
        }
    }
    Ok(hit as f64 / pairs.len() as f64)
}

/// Relative change of a model's error against a benchmark, in percent.
pub fn improvement_vs_benchmark(benchmark: f64, model: f64) -> Result<f64> {
    if benchmark == 0.0 {
        return Err(Error::ZeroBase);
    }
    Ok(100.0 * (model - benchmark) / benchmark)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEvaluation {
    pub metric: String,
    pub period: String,
    pub unit: String,
    pub point: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covered: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_at_risk: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenarios: Option<ScenarioTriple>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskAdjusted {
    pub risk_free: f64,
    pub target: f64,
    pub sharpe: f64,
    pub sortino: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub metric: String,
    pub unit: String,
    pub benchmark: f64,
    pub model: f64,
    pub improvement_pct: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub level: f64,
    pub metrics: Vec<MetricEvaluation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall: Option<ErrorMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub risk_adjusted: Option<RiskAdjusted>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub benchmark: Vec<BenchmarkRow>,
}

#[derive(Debug, Clone, Default)]
pub struct EvaluationInput<'a> {
    pub forecasts: &'a [ForecastRecord],
    /// Empty when no realized values are available yet.
    pub actuals: &'a [ActualRecord],
    pub returns: Option<&'a [f64]>,
    pub risk_free: f64,
    pub target: f64,
    pub benchmark: &'a [(String, String, f64, f64)],
}

/// Build the per-metric and portfolio-level evaluation report.
pub fn evaluate(input: &EvaluationInput<'_>, level: f64) -> Result<EvaluationReport> {
    check_level(level)?;
    let paired = if input.actuals.is_empty() {
        None
    } else {
        Some(pair_records(input.forecasts, input.actuals)?)
    };

    let mut metrics = Vec::with_capacity(input.forecasts.len());
    for (i, f) in input.forecasts.iter().enumerate() {
        let actual = paired.as_ref().map(|p| p[i].1.value);
        let errors = actual.map(|a| error_metrics(&[(f.point, a)])).transpose()?;
        let (interval, var, scenarios) = match &f.distribution {
            Some(d) => (
                Some(confidence_interval(d, level)?),
                Some(value_at_risk(d, level, VarBaseline::Mean)?),
                Some(quantile_scenarios(d)),
            ),
            None => (None, None, None),
        };
        let covered = match (interval, actual) {
            (Some((lo, hi)), Some(a)) => Some(lo <= a && a <= hi),
            _ => None,
        };
        metrics.push(MetricEvaluation {
            metric: f.metric.clone(),
            period: f.period.clone(),
            unit: f.unit.clone(),
            point: f.point,
            actual,
            mae: errors.map(|e| e.mae),
            mape: errors.map(|e| e.mape),
            interval,
            covered,
            value_at_risk: var,
            scenarios,
        });
    }

    let overall = match &paired {
        Some(p) if !p.is_empty() => Some(error_metrics(
            &p.iter()
                .map(|(f, a)| (f.point, a.value))
                .collect::<Vec<_>>(),
        )?),
        _ => None,
    };
    let coverage = match &paired {
        Some(p) if !p.is_empty() && p.iter().all(|(f, _)| f.distribution.is_some()) => {
            Some(coverage(p, level)?)
        }
        _ => None,
    };
    let risk_adjusted = input
        .returns
        .map(|r| -> Result<RiskAdjusted> {
            Ok(RiskAdjusted {
                risk_free: input.risk_free,
                target: input.target,
                sharpe: sharpe(r, input.risk_free)?,
                sortino: sortino(r, input.risk_free, input.target)?,
            })
        })
        .transpose()?;
    let benchmark = input
        .benchmark
        .iter()
        .map(|(metric, unit, b, m)| {
            Ok(BenchmarkRow {
                metric: metric.clone(),
                unit: unit.clone(),
                benchmark: *b,
                model: *m,
                improvement_pct: improvement_vs_benchmark(*b, *m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(EvaluationReport {
        level,
        metrics,
        overall,
        coverage,
        risk_adjusted,
        benchmark,
    })
}
