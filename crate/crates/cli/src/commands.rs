use std::collections::BTreeMap;
use std::io::Write;

use ifrisk_core::forecast::{
    aggregate_mc_samples, evaluate, quantile_scenarios, EvaluationInput, ForecastRecord,
    ScenarioProvenance,
};
use ifrisk_core::io::decision::{raw_weights_in_order, weights_in_order};
use ifrisk_core::io::panel::{minmax_table, zscore_table};
use ifrisk_core::io::records::{load_benchmark, load_returns, load_scenario_set, SampleGroup};
use ifrisk_core::io::{
    build_correlation_graph, knn_impute, load_actuals, load_decision_matrix, load_forecasts,
    load_returns_panel, load_samples, load_scenario_bundle, load_weights, to_canonical_json,
    write_file, FeatureTable,
};
use ifrisk_core::ranking::{rank, RankOptions};
use ifrisk_core::report::{self, MeasureWeights, WeightsReport};
use ifrisk_core::scenario::{
    run_sweep, scenario_report, summarize, MetricScenario, ResponseTable, ScenarioSet,
    SummarySelector,
};
use ifrisk_core::weighting::{column_entropies, weights_from_entropies, EntropyMeasure};
use ifrisk_core::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{
    Cli, Command, EvaluateArgs, Format, GraphArgs, PreprocessOp, RankArgs, ScenarioArgs,
    SelectorArg, SensitivityArgs, WeightsArgs,
};

pub fn run(cli: &Cli) -> Result<()> {
    let text = match &cli.command {
        Command::Rank(a) => rank_cmd(a, cli.format)?,
        Command::Weights(a) => weights_cmd(a, cli.format)?,
        Command::Evaluate(a) => evaluate_cmd(a, cli)?,
        Command::Sensitivity(a) => sensitivity_cmd(a, cli.format)?,
        Command::Scenario(a) => scenario_cmd(a, cli.format)?,
        Command::Preprocess(a) => preprocess_cmd(&a.op, cli.format)?,
        Command::Graph(a) => graph_cmd(a, cli.format)?,
    };
    match &cli.out {
        Some(path) => write_file(path, &text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn render<T: Serialize>(
    format: Format,
    value: &T,
    table: impl FnOnce() -> String,
    csv: impl FnOnce() -> Result<String>,
) -> Result<String> {
    match format {
        Format::Table => Ok(table()),
        Format::Csv => csv(),
        Format::Json => to_canonical_json(value),
    }
}

fn rank_cmd(a: &RankArgs, format: Format) -> Result<String> {
    let problem = load_decision_matrix(&a.matrix)?;
    let weights = a
        .weights
        .as_deref()
        .map(|spec| weights_in_order(&load_weights(spec)?, problem.criteria()))
        .transpose()?;
    let result = rank(
        &problem,
        &RankOptions {
            variant: a.variant,
            measure: a.measure,
            weights,
        },
    )?;
    render(
        format,
        &result,
        || report::ranking_table(&result),
        || report::ranking_csv(&result),
    )
}

fn weights_cmd(a: &WeightsArgs, format: Format) -> Result<String> {
    let problem = load_decision_matrix(&a.matrix)?;
    let measures: Vec<EntropyMeasure> = if a.measure.eq_ignore_ascii_case("all") {
        EntropyMeasure::ALL.to_vec()
    } else {
        vec![a
            .measure
            .parse()
            .map_err(|_| Error::Schema(format!("unknown entropy measure '{}'", a.measure)))?]
    };
    let reference = a
        .reference
        .as_deref()
        .map(|spec| raw_weights_in_order(&load_weights(spec)?, problem.criteria()))
        .transpose()?;
    let matrix = problem.flattened();
    let measures = measures
        .into_iter()
        .map(|measure| {
            let entropies = column_entropies(&matrix, measure)?;
            let w = weights_from_entropies(&entropies)?;
            let max_abs_deviation = reference
                .as_deref()
                .map(|r| w.max_abs_deviation(r))
                .transpose()?;
            Ok(MeasureWeights {
                measure,
                entropies,
                weights: w.as_slice().to_vec(),
                max_abs_deviation,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r = WeightsReport {
        criteria: problem.criteria().iter().map(|c| c.id.clone()).collect(),
        reference,
        measures,
    };
    render(
        format,
        &r,
        || report::weights_table(&r),
        || report::weights_csv(&r),
    )
}

/// Gaussian summaries of Monte-Carlo passes attached to (or standing in for)
/// the forecasts with the same metric and period.
fn attach_samples(
    mut forecasts: Vec<ForecastRecord>,
    groups: Vec<SampleGroup>,
    units: &BTreeMap<(String, String), String>,
) -> Result<Vec<ForecastRecord>> {
    for g in groups {
        let d = aggregate_mc_samples(&g.samples)?;
        match forecasts
            .iter()
            .position(|f| f.metric == g.metric && f.period == g.period)
        {
            Some(i) => {
                let f = forecasts[i].clone();
                forecasts[i] = f.with_distribution(d, true)?;
            }
            None => {
                let unit = units
                    .get(&(g.metric.clone(), g.period.clone()))
                    .cloned()
                    .unwrap_or_default();
                let f = ForecastRecord::new(g.metric, g.period, unit, d.mean());
                forecasts.push(f.with_distribution(d, false)?);
            }
        }
    }
    Ok(forecasts)
}

fn evaluate_cmd(a: &EvaluateArgs, cli: &Cli) -> Result<String> {
    if a.forecasts.is_none() && a.samples.is_none() {
        return Err(Error::Schema(
            "evaluate needs --forecasts or --samples".into(),
        ));
    }
    let actuals = a
        .actuals
        .as_deref()
        .map(load_actuals)
        .transpose()?
        .unwrap_or_default();
    let mut forecasts = a
        .forecasts
        .as_deref()
        .map(load_forecasts)
        .transpose()?
        .unwrap_or_default();
    if let Some(spec) = &a.samples {
        let units = actuals
            .iter()
            .map(|r| ((r.metric.clone(), r.period.clone()), r.unit.clone()))
            .collect();
        forecasts = attach_samples(forecasts, load_samples(spec)?, &units)?;
    }
    if let Some(n) = a.simulate {
        let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
        for f in &mut forecasts {
            if let Some(d) = &f.distribution {
                let draws = d.sample(&mut rng, n);
                f.distribution = Some(aggregate_mc_samples(&draws)?);
            }
        }
    }
    let returns = a.returns.as_deref().map(load_returns).transpose()?;
    let benchmark = a
        .benchmark
        .as_deref()
        .map(load_benchmark)
        .transpose()?
        .unwrap_or_default();
    let r = evaluate(
        &EvaluationInput {
            forecasts: &forecasts,
            actuals: &actuals,
            returns: returns.as_deref(),
            risk_free: a.rf,
            target: a.target,
            benchmark: &benchmark,
        },
        cli.level,
    )?;
    render(
        cli.format,
        &r,
        || report::evaluation_table(&r),
        || report::evaluation_csv(&r),
    )
}

#[derive(Serialize)]
struct SensitivityOutput<'a> {
    model: &'a str,
    tables: &'a [ResponseTable],
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a ifrisk_core::SensitivitySummary>,
}

fn sensitivity_cmd(a: &SensitivityArgs, format: Format) -> Result<String> {
    let bundle = load_scenario_bundle(&a.model)?;
    let drivers: Vec<String> = if a.driver.is_empty() {
        bundle.sweeps.iter().map(|s| s.driver.clone()).collect()
    } else {
        a.driver.clone()
    };
    let tables = drivers
        .iter()
        .map(|d| {
            let sweep = bundle.sweep(d).ok_or_else(|| {
                Error::Schema(format!(
                    "model '{}' has no sweep for driver '{d}'",
                    bundle.name
                ))
            })?;
            run_sweep(&bundle.model, sweep, &bundle.metrics, a.allow_extrapolate)
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = if a.summary {
        let selector = match a.selector {
            SelectorArg::MaxAbsDelta => SummarySelector::MaxAbsDelta,
            SelectorArg::Last => SummarySelector::Last,
            SelectorArg::Verbatim if bundle.verbatim.is_empty() => {
                return Err(Error::Schema(format!(
                    "model '{}' has no verbatim row picks",
                    bundle.name
                )))
            }
            SelectorArg::Verbatim => bundle.verbatim_selector(),
        };
        Some(summarize(&tables, &bundle.base, &selector)?)
    } else {
        None
    };
    let out = SensitivityOutput {
        model: &bundle.name,
        tables: &tables,
        summary: summary.as_ref(),
    };
    render(
        format,
        &out,
        || match &summary {
            Some(s) => report::summary_table(s, &bundle.unit),
            None => tables
                .iter()
                .map(|t| report::response_table_text(t, &bundle.unit))
                .collect::<Vec<_>>()
                .join("\n"),
        },
        || match &summary {
            Some(s) => report::summary_csv(s),
            None => {
                let mut out = String::new();
                for (i, t) in tables.iter().enumerate() {
                    let csv = report::response_table_csv(t)?;
                    let body = if i == 0 {
                        &csv[..]
                    } else {
                        csv.split_once('\n').map_or("", |x| x.1)
                    };
                    out.push_str(body);
                }
                Ok(out)
            }
        },
    )
}

fn scenario_cmd(a: &ScenarioArgs, format: Format) -> Result<String> {
    let set = match (&a.source.triples, &a.source.forecasts) {
        (Some(spec), _) => load_scenario_set(spec)?,
        (None, Some(spec)) => {
            let forecasts = load_forecasts(spec)?;
            let metrics = forecasts
                .iter()
                .map(|f| {
                    let d = f
                        .distribution
                        .as_ref()
                        .ok_or_else(|| Error::MissingDistribution {
                            metric: f.metric.clone(),
                            period: f.period.clone(),
                        })?;
                    let t = quantile_scenarios(d);
                    Ok(MetricScenario {
                        metric: f.metric.clone(),
                        unit: f.unit.clone(),
                        worst: t.worst,
                        base: t.base,
                        best: t.best,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            ScenarioSet {
                period: forecasts
                    .first()
                    .map(|f| f.period.clone())
                    .unwrap_or_default(),
                provenance: ScenarioProvenance::Derived,
                metrics,
            }
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let set = scenario_report(&set)?;
    render(
        format,
        set,
        || report::scenario_block(set),
        || report::scenario_csv(set),
    )
}

fn preprocess_cmd(op: &PreprocessOp, format: Format) -> Result<String> {
    let out = match op {
        PreprocessOp::Impute { input, k } => knn_impute(&FeatureTable::load(input)?, *k)?,
        PreprocessOp::Zscore { input } => {
            let (t, constant) = zscore_table(&FeatureTable::load(input)?)?;
            for c in constant {
                eprintln!("warning: column '{c}' is constant; z-scores set to 0");
            }
            t
        }
        PreprocessOp::Minmax { input, lo, hi } => {
            minmax_table(&FeatureTable::load(input)?, *lo, *hi)?
        }
    };
    render(format, &out, || report::panel_table(&out), || out.to_csv())
}

fn graph_cmd(a: &GraphArgs, format: Format) -> Result<String> {
    let g = build_correlation_graph(&load_returns_panel(&a.returns)?, a.window, a.beta)?;
    render(format, &g, || report::graph_table(&g), || g.to_edge_csv())
}
