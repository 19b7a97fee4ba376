//! Criterion benchmarks for `nondarcy-core`; see `benches/`.
