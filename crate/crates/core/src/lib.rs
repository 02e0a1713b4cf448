//! Adaptive (online) principal component analysis for time-varying data.
//!
//! [`adaptive`] updates a set of eigenvectors once per incoming time-step,
//! either against every previous sample or against a bounded random subset.
//! [`batch`] computes exact PCA through the dual Gram eigenproblem and serves
//! as the reference; [`eval`] compares the two through explained-variance
//! curves. [`data`] loads voxel volumes, PGM frame sequences and synthetic
//! streams.
//!
//! All scalars are `f64`. Randomness comes from [`RngState`], a fixed
//! xoshiro256** generator, so stochastic runs are reproducible from a seed.

// `!(x > t)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adaptive;
pub mod batch;
pub mod counter;
pub mod data;
mod error;
pub mod eval;
pub mod numeric;
pub mod rng;
pub mod store;

pub use adaptive::{update_component, AdaptiveConfig, AdaptiveState, DegenerateEvent, OjaState};
pub use batch::{
    dual_pca, gram, sym_eig, EigenSpace, GramMatrix, Matrix, SymEigen, DEFAULT_RANK_TOL,
};
pub use counter::OpCounter;
pub use error::{PcaError, Result};
pub use eval::{
    curve_gap, eigenfunctions, explained_variance, mean_curve, subspace_overlap, CurveSeries,
    EigenfunctionMatrix,
};
pub use numeric::{dot, normalize, sample_indices};
pub use rng::RngState;
pub use store::SampleStore;
