//! File formats, bundled fixtures, preprocessing and graph construction.
//!
//! Every loader accepts either a filesystem path or `fixtures:<name>`, which
//! resolves to a fixture compiled into the crate (see [`fixtures`]).

pub mod canonical;
pub mod decision;
pub mod fixtures;
pub mod graph;
pub mod panel;
pub mod records;

use std::path::Path;

use crate::error::{Error, Result};

pub use canonical::{canonical_number, to_canonical_json};
pub use decision::{load_decision_matrix, load_weights, parse_decision_matrix, parse_weights};
pub use graph::{build_correlation_graph, load_returns_panel, FirmGraph, FirmSeries};
pub use panel::{knn_impute, minmax_scale, zscore_normalize, FeatureTable};
pub use records::{
    load_actuals, load_forecasts, load_samples, load_scenario_bundle, ScenarioBundle,
};

pub const FIXTURE_PREFIX: &str = "fixtures:";

/// Read a path or an embedded fixture into memory.
pub fn read_source(spec: &str) -> Result<String> {
    if let Some(name) = spec.strip_prefix(FIXTURE_PREFIX) {
        return fixtures::get(name)
            .map(str::to_owned)
            .ok_or_else(|| Error::FixtureNotFound(name.to_owned()));
    }
    let path = Path::new(spec);
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write `contents` to `path`.
pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
