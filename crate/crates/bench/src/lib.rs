//! Criterion benchmarks for `runlab`; see `benches/`.
