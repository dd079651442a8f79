//! Data bundled with the crate, addressable as `fixtures:<name>`.

const FIXTURES: &[(&str, &str)] = &[
    ("table12.json", include_str!("../../fixtures/table12.json")),
    (
        "weights_published.json",
        include_str!("../../fixtures/weights_published.json"),
    ),
    (
        "paper-2024q2.json",
        include_str!("../../fixtures/paper-2024q2.json"),
    ),
    (
        "table3_scenarios.json",
        include_str!("../../fixtures/table3_scenarios.json"),
    ),
    (
        "table4_pred.csv",
        include_str!("../../fixtures/table4_pred.csv"),
    ),
    (
        "table4_actual.csv",
        include_str!("../../fixtures/table4_actual.csv"),
    ),
    (
        "table5_benchmark.csv",
        include_str!("../../fixtures/table5_benchmark.csv"),
    ),
    (
        "mc_samples.csv",
        include_str!("../../fixtures/mc_samples.csv"),
    ),
    (
        "panel_masked.csv",
        include_str!("../../fixtures/panel_masked.csv"),
    ),
    (
        "returns_demo.csv",
        include_str!("../../fixtures/returns_demo.csv"),
    ),
];

/// Look a fixture up by file name, with or without its extension.
pub fn get(name: &str) -> Option<&'static str> {
    FIXTURES
        .iter()
        .find(|(file, _)| {
            *file == name || file.rsplit_once('.').is_some_and(|(stem, _)| stem == name)
        })
        .map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|(file, _)| *file)
}
