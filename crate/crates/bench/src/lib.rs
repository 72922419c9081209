//! Criterion benchmarks for `zclass-core`; see `benches/`.
