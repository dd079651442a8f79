use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    // --- intuitionistic fuzzy numbers ---
    #[error("membership {mu} or non-membership {nu} outside [0, 1]")]
    OutOfRange { mu: f64, nu: f64 },
    #[error("membership {mu} + non-membership {nu} exceeds 1")]
    SumExceedsOne { mu: f64, nu: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("expected {expected} weights, got {got}")]
    WeightMismatch { expected: usize, got: usize },
    #[error("bad weights: {0}")]
    BadWeights(String),

    // --- weighting / ranking ---
    #[error("empty criterion column")]
    EmptyColumn,
    #[error("every criterion has entropy 1; weights are undefined")]
    AllCriteriaUninformative,
    #[error("all appraisal scores are zero; MARCOS utilities are undefined")]
    DegenerateScores,
    #[error("invalid decision problem: {0}")]
    InvalidProblem(String),

    // --- forecast evaluation ---
    #[error("confidence level {0} outside (0, 1)")]
    BadLevel(f64),
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("invalid predictive distribution: {0}")]
    InvalidDistribution(String),
    #[error("actual value is zero; MAPE is undefined")]
    ZeroActual,
    #[error("returns have zero dispersion")]
    ZeroDispersion,
    #[error("no return falls below the target; downside deviation is zero")]
    NoDownside,
    #[error("forecast {metric}/{period} has no predictive distribution")]
    MissingDistribution { metric: String, period: String },
    #[error("unit mismatch for {metric}/{period}: forecast '{forecast}' vs actual '{actual}'")]
    UnitMismatch {
        metric: String,
        period: String,
        forecast: String,
        actual: String,
    },
    #[error("pairing error: {0}")]
    Pairing(String),

    // --- scenarios ---
    #[error("percent change against a zero base")]
    ZeroBase,
    #[error("response model does not cover driver '{driver}' / metric '{metric}'")]
    UncoveredPair { driver: String, metric: String },
    #[error("driver '{driver}' value {value} outside lookup domain [{lo}, {hi}]")]
    ExtrapolationOutsideDomain {
        driver: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
    #[error("metric mismatch: {0}")]
    MetricMismatch(String),
    #[error("scenario ordering violated for '{metric}': worst {worst}, base {base}, best {best}")]
    OrderingViolation {
        metric: String,
        worst: f64,
        base: f64,
        best: f64,
    },

    // --- preprocessing / graph ---
    #[error("column is constant")]
    ConstantColumn,
    #[error("need at least 2 observed values, got {0}")]
    TooFewValues(usize),
    #[error("bad target range [{lo}, {hi}]")]
    BadRange { lo: f64, hi: f64 },
    #[error("row {row}, column '{column}': only {found} neighbour candidates for k = {k}")]
    NotEnoughNeighbors {
        row: usize,
        column: String,
        found: usize,
        k: usize,
    },
    #[error("column '{0}' has no observed values")]
    AllMissingColumn(String),
    #[error("series for '{firm}' has {len} observations, need at least {need}")]
    TooShortSeries {
        firm: String,
        len: usize,
        need: usize,
    },
    #[error("series for '{0}' has zero variance over the window")]
    ZeroVarianceSeries(String),

    // --- input ---
    #[error("{}: {}", path.display(), io_reason(source))]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<u64>, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid IFN at row {row}, column {column}: {source}")]
    InvalidIfn {
        row: usize,
        column: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("unknown fixture '{0}'")]
    FixtureNotFound(String),
}

fn io_reason(e: &std::io::Error) -> String {
    match e.kind() {
        std::io::ErrorKind::NotFound => "file not found".into(),
        _ => e.to_string(),
    }
}

impl Error {
    /// Errors caused by malformed or inconsistent input files rather than by
    /// the computation itself.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Io { .. }
                | Error::Parse { .. }
                | Error::Schema(_)
                | Error::InvalidIfn { .. }
                | Error::FixtureNotFound(_)
                | Error::UnitMismatch { .. }
                | Error::Pairing(_)
        )
    }

    pub(crate) fn parse(line: Option<u64>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let line = (e.line() > 0).then_some(e.line() as u64);
        match e.classify() {
            serde_json::error::Category::Data => Error::Schema(e.to_string()),
            _ => Error::parse(line, e.to_string()),
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map(|p| p.line());
        Error::parse(line, e.to_string())
    }
}
