//! Benchmarks for blindspin live in `benches/`.
