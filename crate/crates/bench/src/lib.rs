//! Criterion benchmarks for the qnahm engine live in `benches/engine.rs`;
//! run them with `cargo bench -p qnahm-bench`.
