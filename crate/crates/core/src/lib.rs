//! Principal component analysis with and without mean centering.
//!
//! Two PCA routes ([`pca::scheme1`] via covariance, [`pca::scheme2`] via SVD),
//! a diagonal-plus-rank-one eigensolver ([`dpr1`]), diagnostics comparing the
//! spectra of a data matrix and its centered copy ([`diagnostics`]), and
//! Procrustes alignment of embeddings ([`alignment`]).

pub mod alignment;
pub mod diagnostics;
pub mod dpr1;
pub mod error;
pub mod ingest;
pub mod linalg;
pub mod matrix;
pub mod pca;
pub mod report;
pub mod synthetic;

pub use error::{Error, Result};
pub use matrix::{DataMatrix, Matrix};
