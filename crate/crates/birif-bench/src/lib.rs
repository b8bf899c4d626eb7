//! Benchmark-only crate; see `benches/norms.rs`.
