//! Criterion benchmarks for the ranking and forecasting pipeline live in `benches/`.
