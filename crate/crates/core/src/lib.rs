//! Time-series nearest-neighbor retrieval under constrained dynamic time
//! warping.
//!
//! The crate provides the banded DTW for any integer norm exponent and the
//! max norm, warping envelopes built in linear time, the LB_Keogh and
//! two-pass LB_Improved lower bounds, a piecewise-sum reduction with an
//! R*-tree over the projected points, five exact nearest-neighbor
//! strategies built from those parts, seeded synthetic generators, and the
//! experiment harness driving the benchmark, triangle-inequality, and
//! classification studies.
//!
//! All numeric kernels are generic over the [`Sample`] scalar (`f32` or
//! `f64` via `num-traits`); the dataset file formats, the experiments, and
//! the CLI work in `f64` — see the `*64` aliases below.

pub mod bounds;
pub mod datagen;
pub mod dtw;
pub mod envelope;
mod error;
pub mod experiments;
pub mod io;
pub mod norms;
pub mod params;
pub mod reduction;
pub mod rtree;
pub mod scalar;
pub mod search;
pub mod series;

pub use bounds::{lb_improved, lb_keogh, project, BoundValue, Projection};
pub use datagen::{generate, generate_database, mix_seed, Family, GeneratorSpec};
pub use dtw::{dtw, dtw_bruteforce, dtw_bruteforce_with_path, WarpingPath, BRUTE_FORCE_MAX_LEN};
pub use envelope::{envelope_naive, envelope_streaming, envelope_streaming_counted, Envelope};
pub use error::{Error, Result};
pub use io::{load_dataset, save_dataset, DatasetFormat};
pub use norms::{lp_dist, lp_norm, point_interval_dist};
pub use params::{Exponent, SearchParams};
pub use reduction::{
    envelope_rect, make_cover, project_series, rect_dist_l1, Hyperrectangle, PiecewiseCover,
    ProjectedPoint,
};
pub use rtree::{CandidateStream, RTreeIndex};
pub use scalar::Sample;
pub use search::{
    build_index, nn_exhaustive, nn_indexed, nn_linear_improved, nn_linear_keogh, nn_search,
    SearchCounters, SearchOptions, SearchOutcome, Strategy,
};
pub use series::{Dataset, TimeSeries};

/// `f64`-sampled series, the concrete type used by the file formats and CLI.
pub type TimeSeries64 = TimeSeries<f64>;
pub type TimeSeries32 = TimeSeries<f32>;
pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type Envelope64 = Envelope<f64>;
