//! Sliced Wasserstein distances and asymptotic inference for empirical measures.
//!
//! The crate is organized around the pipeline
//!
//! 1. [`measures`] — weighted point clouds in `R^d`, projections onto
//!    one-dimensional subspaces, and quantile functions of the projections;
//! 2. [`ot1d`] — exact one-dimensional optimal transport: trimmed quantile
//!    costs, Kantorovich potentials in closed piecewise form, c-transforms,
//!    and dual values;
//! 3. [`sliced`] — aggregation over directions: Monte-Carlo sliced distance,
//!    fixed-grid (discrete) sliced distance, max-sliced via projected gradient
//!    ascent on the unit sphere, distributional sliced over finite families,
//!    and the amplitude functional;
//! 4. [`inference`] — plug-in covariance estimation for the direction-indexed
//!    limit process, limiting variances for the sliced and max-sliced
//!    statistics, the m-out-of-n bootstrap, and percentile confidence
//!    intervals;
//! 5. [`samplers`] — synthetic models (spheres, ellipsoid surfaces, boxes,
//!    spiked pairs) used by the experiment harness;
//! 6. [`harness`] — replicated CLT simulations, bootstrap studies, and their
//!    KDE/Q-Q/KS summaries written as flat CSV/JSON files.
//!
//! All heavy inner loops (directions, replications, bootstrap draws) run
//! through [`par::map_indices`], which is backed by rayon when the `parallel`
//! feature (default) is enabled and degrades to a plain sequential loop
//! otherwise. Work items derive their RNG seeds from `(master_seed, index)`
//! via [`seed::mix64`], and results are always reduced in index order, so
//! output is bit-identical for a fixed seed regardless of worker count.

pub mod harness;
pub mod inference;
pub mod measures;
pub mod ot1d;
pub mod par;
pub mod samplers;
pub mod seed;
pub mod sliced;

pub use inference::{BootstrapSample, ConfidenceInterval, CovarianceEstimate, SampleRatio};
pub use measures::{Direction, EmpiricalMeasure, SortedSlice};
pub use ot1d::PiecewisePotential;
pub use sliced::{MaxSlicedResult, SliceField};

use thiserror::Error;

/// Error variants shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Inputs have incompatible dimensions (e.g. a direction in the wrong
    /// ambient space, or point clouds of different dimension).
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A scalar argument is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Construction-time invariant violated (weights, norms, radii, shapes).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation only defined for equal-size uniform-weight slices was
    /// called on something else.
    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// A numerical procedure failed to produce a finite result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// I/O or parse failure while reading/writing external files.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// CSV parse failure with location information.
    #[error("parse error at {path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
