//! Reproduction studies: retrieval/pruning benchmark, triangle-inequality
//! violation rates, and 1-NN classification accuracy across norms.
//!
//! Reports are plain structs with CSV writers; wall-clock times are
//! informational only, every asserted quantity is an operation count.

mod bench;
mod classify;
mod triangle;

pub use bench::{run_pruning_bench, BenchConfig, BenchPoint, BenchReport};
pub use classify::{run_classification, ClassReport, ClassifyConfig, ClassifyPoint};
pub use triangle::{run_triangle, Histogram, TriangleAccumulator, TriangleConfig, TriangleReport};
