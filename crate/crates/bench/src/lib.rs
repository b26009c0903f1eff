//! Benchmarks for the solver and the pulse-level simulator live under `benches/`.
