//! `ifrisk` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation fails, 2 when an input is
//! missing or malformed. Diagnostics go to standard error.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifrisk_core::ranking::EdasVariant;
use ifrisk_core::weighting::EntropyMeasure;

#[derive(Debug, Parser)]
#[command(
    name = "ifrisk",
    version,
    about = "Risk-aware forecast evaluation and fuzzy multi-criteria model ranking"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Confidence level for intervals, coverage and VaR.
    #[arg(long, global = true, default_value_t = 0.95)]
    pub level: f64,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rank alternatives with entropy weights, EDAS and MARCOS.
    Rank(RankArgs),
    /// Entropy criterion weights, optionally against a reference vector.
    Weights(WeightsArgs),
    /// Error metrics, intervals, VaR and risk-adjusted ratios.
    Evaluate(EvaluateArgs),
    /// Driver sweeps over a response model and their summary.
    Sensitivity(SensitivityArgs),
    /// Worst / base / best scenario block.
    Scenario(ScenarioArgs),
    /// Feature panel preprocessing.
    Preprocess(PreprocessArgs),
    /// Correlation graph between firms.
    Graph(GraphArgs),
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Decision matrix JSON (path or `fixtures:<name>`).
    #[arg(long)]
    pub matrix: String,
    /// Weight map JSON; entropy weights are used when absent.
    #[arg(long)]
    pub weights: Option<String>,
    #[arg(long, default_value_t = EdasVariant::Membership)]
    pub variant: EdasVariant,
    #[arg(long, default_value_t = EntropyMeasure::Szmidt)]
    pub measure: EntropyMeasure,
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    #[arg(long)]
    pub matrix: String,
    /// Entropy measure, or `all` for every measure.
    #[arg(long, default_value = "szmidt")]
    pub measure: String,
    /// Weight map to report deviations against.
    #[arg(long)]
    pub reference: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Forecast CSV `metric,period,unit,point[,mean,std]`.
    #[arg(long)]
    pub forecasts: Option<String>,
    /// Actuals CSV `metric,period,unit,value`.
    #[arg(long)]
    pub actuals: Option<String>,
    /// Monte-Carlo samples CSV `metric,period,sample_index,value`.
    #[arg(long)]
    pub samples: Option<String>,
    /// Replace each forecast distribution by the aggregate of this many seeded draws.
    #[arg(long)]
    pub simulate: Option<usize>,
    /// Returns CSV `period,value` for Sharpe and Sortino.
    #[arg(long)]
    pub returns: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub rf: f64,
    /// Sortino target return.
    #[arg(long, default_value_t = 0.0)]
    pub target: f64,
    /// Benchmark CSV `metric,unit,benchmark,model`.
    #[arg(long)]
    pub benchmark: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelectorArg {
    MaxAbsDelta,
    Last,
    Verbatim,
}

#[derive(Debug, Args)]
pub struct SensitivityArgs {
    /// Scenario bundle JSON, e.g. `fixtures:paper-2024q2`.
    #[arg(long)]
    pub model: String,
    /// Drivers to sweep; all drivers when omitted.
    #[arg(long)]
    pub driver: Vec<String>,
    #[arg(long, value_enum, default_value_t = SelectorArg::MaxAbsDelta)]
    pub selector: SelectorArg,
    #[arg(long)]
    pub allow_extrapolate: bool,
    /// Print the summary table instead of the sweep tables.
    #[arg(long)]
    pub summary: bool,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct ScenarioSource {
    /// Scenario JSON with supplied worst / base / best values.
    #[arg(long)]
    pub triples: Option<String>,
    /// Forecast CSV with distributions; scenarios are the 10th / 50th / 90th percentiles.
    #[arg(long)]
    pub forecasts: Option<String>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[command(flatten)]
    pub source: ScenarioSource,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    #[command(subcommand)]
    pub op: PreprocessOp,
}

#[derive(Debug, Subcommand)]
pub enum PreprocessOp {
    /// Fill missing cells from the k nearest rows.
    Impute {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 5)]
        k: usize,
    },
    /// Standardize every column.
    Zscore {
        #[arg(long = "in")]
        input: String,
    },
    /// Rescale every column to `[lo, hi]`.
    Minmax {
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
    },
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Long returns CSV `firm,sector,period,value`.
    #[arg(long)]
    pub returns: String,
    #[arg(long, default_value_t = 4)]
    pub window: usize,
    /// Same-sector multiplier bonus.
    #[arg(long, default_value_t = ifrisk_core::io::graph::DEFAULT_SECTOR_BONUS, allow_hyphen_values = true)]
    pub beta: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}
