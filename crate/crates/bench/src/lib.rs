//! Criterion benchmarks for `jetsphere-core`; see `benches/`.
