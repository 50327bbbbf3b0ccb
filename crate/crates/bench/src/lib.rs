//! Criterion benchmarks for `fjopt-core`; see `benches/`.
