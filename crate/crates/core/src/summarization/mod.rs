//! Frame selection for video summaries.
//!
//! Frames are feature vectors; a Gaussian kernel gives the Gram matrix `X`
//! and a summary `S` scores `det(I + X_S)`. The video is cut into contiguous
//! segments, each contributing a fixed number of frames.

mod features;
mod linalg;
mod objective;

pub use features::{gaussian_gram, median_bandwidth, Bandwidth, FrameFeatures, GramMatrix};
pub use linalg::{
    cholesky, symmetric_eigenvalues, SymMatrix, DEFAULT_JACOBI_TOL, MAX_JACOBI_SWEEPS,
};
pub use objective::{lemma4_from_spectrum, lemma4_gamma_bound, segment_partition, DetObjective};
