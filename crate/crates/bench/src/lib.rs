//! Benchmarks for the hot paths of `contraforge`. Run with `cargo bench -p contraforge-bench`.
