//! Selection with a fixed pivot and the estimators built on it.
//!
//! The kernel in [`select`] finds the k-th smallest element by repeatedly
//! partitioning around the element currently at position k. Everything else
//! in the crate reuses it: weighted percentiles, the medcouple, the
//! C-step and forward-search updates of robust estimators, and a weighted
//! median image filter.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod harness;
pub mod medcouple;
pub mod raster;
pub mod rng;
pub mod robust;
pub mod select;
pub mod shuffle;
pub mod vervaat;
pub mod weighted;

pub use error::{Error, Result};
pub use harness::{bench_run, dickman_fit, sample, BenchConfig, BenchRow, Dist, RankSpec, Variant};
pub use medcouple::{medcouple_fast, medcouple_kernel, medcouple_naive, sample_median};
pub use raster::{
    add_salt_pepper, read_pnm, weighted_median_filter, write_pnm, Mask3, Raster,
};
pub use rng::{MersenneTwister, MtState, OutputMode, RSeedState};
pub use robust::{
    cstep, fs_progression, mahalanobis_sq, mcd_approx, EllipsoidEstimate, FsState, UpdateBackend,
};
pub use select::{
    partition_step, select_kth, select_kth_instrumented, trace_passes, worst_case_input,
    ComparisonBreakdown, PivotStatus, SelectBuffer, SelectOptions,
};
pub use shuffle::backward_shuffle;
pub use vervaat::{dickman_cdf, vervaat_pdf_cdf, vervaat_rnd, VervaatParams, XdfMethod};
pub use weighted::{
    weighted_median, weighted_percentile, weighted_percentile_oracle, WeightedResult,
    WeightedSample,
};
