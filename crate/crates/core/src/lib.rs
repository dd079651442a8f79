//! Intuitionistic fuzzy multi-criteria ranking of forecasting models and
//! risk-aware evaluation of probabilistic forecasts.
//!
//! The crate is organised bottom-up:
//!
//! - [`ifs`]: intuitionistic fuzzy numbers, their ordering, distance and
//!   weighted aggregation.
//! - [`weighting`]: entropy-based objective criterion weights.
//! - [`ranking`]: EDAS appraisal scores followed by MARCOS utilities.
//! - [`forecast`]: predictive distributions, intervals, error metrics, VaR,
//!   Sharpe and Sortino ratios, interval coverage.
//! - [`scenario`]: driver sweeps and percent-change summaries.
//! - [`io`]: file formats, bundled fixtures, preprocessing and the firm
//!   correlation graph.
//! - [`report`]: text, CSV and canonical JSON rendering shared by the CLI.

pub mod error;
pub mod forecast;
pub mod ifs;
pub mod io;
pub mod ranking;
pub mod report;
pub mod scenario;
pub mod weighting;

pub use error::{Error, Result};
pub use forecast::{ActualRecord, EvaluationReport, ForecastRecord, PredictiveDistribution};
pub use ifs::{HesitantIfn, Ifn};
pub use ranking::{
    DecisionProblem, EdasScores, EdasVariant, MarcosResult, RankOptions, RankingResult,
};
pub use scenario::{DriverSweep, ResponseModel, ResponseTable, SensitivitySummary};
pub use weighting::{CriterionKind, CriterionSpec, EntropyMeasure, WeightVector};
