//! Criterion benchmarks for the `chainsim-core` kernels; see `benches/kernels.rs`.
