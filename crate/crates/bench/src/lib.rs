//! Criterion benchmarks for the codecs live in `benches/`.
