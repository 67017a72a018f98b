//! Criterion benchmarks for the construction and certification pipeline; see `benches/`.
