//! PCA by covariance eigendecomposition and by SVD.
//!
//! Both routes finish by multiplying the raw data matrix by the projection,
//! so an uncentered input produces an uncentered embedding. Set
//! [`PcaOptions::project_centered`] to project `X - 1 x̄ᵀ` instead.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{gram, jacobi_eigh, svd};
use crate::matrix::{DataMatrix, Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Eigendecomposition of the empirical covariance.
    CovarianceEig,
    /// SVD of the centered data matrix.
    SvdCentered,
    /// SVD of the data matrix as given.
    SvdUncentered,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct PcaOptions {
    pub project_centered: bool,
}

#[derive(Clone, Debug)]
pub struct PcaModel {
    /// `p x k` matrix whose columns are the leading principal directions.
    pub projection: Matrix,
    pub mean: Vec<f64>,
    pub scheme: Scheme,
    /// Covariance eigenvalues (`CovarianceEig`) or squared singular values.
    pub spectrum: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub coords: Matrix,
    pub model: PcaModel,
}

pub fn column_mean(x: &DataMatrix) -> Vec<f64> {
    let m = x.matrix();
    let n = m.nrows() as f64;
    let mut sums = vec![0.0; m.ncols()];
    for i in 0..m.nrows() {
        for (s, v) in sums.iter_mut().zip(m.row(i)) {
            *s += v;
        }
    }
    sums.into_iter().map(|s| s / n).collect()
}

/// `X - 1ₙ x̄ᵀ`.
pub fn center(x: &DataMatrix) -> DataMatrix {
    let mean = column_mean(x);
    let mut m = x.matrix().clone();
    for i in 0..m.nrows() {
        for (v, mu) in m.row_mut(i).iter_mut().zip(&mean) {
            *v -= mu;
        }
    }
    DataMatrix::new(m).expect("centering preserves shape and finiteness")
}

pub fn scheme1(x: &DataMatrix, k: usize) -> Result<Embedding> {
    scheme1_with(x, k, PcaOptions::default())
}

/// Covariance `X̄ᵀX̄ / (n - 1)`, its eigendecomposition, then `Y = X V_{1:k}`.
pub fn scheme1_with(x: &DataMatrix, k: usize, opts: PcaOptions) -> Result<Embedding> {
    check_k(x, k)?;
    if x.n() < 2 {
        return Err(Error::InsufficientData { required: 2, got: x.n() });
    }
    x.require_tall()?;
    let centered = center(x);
    let cov = gram(&centered).map(|v| v / (x.n() as f64 - 1.0));
    let eig = jacobi_eigh(&cov)?;
    let model = PcaModel {
        projection: eig.vectors.leading_cols(k),
        mean: column_mean(x),
        scheme: Scheme::CovarianceEig,
        spectrum: eig.values,
    };
    embed(x, &centered, model, opts)
}

pub fn scheme2(x: &DataMatrix, k: usize, do_center: bool) -> Result<Embedding> {
    scheme2_with(x, k, do_center, PcaOptions::default())
}

/// SVD of `X̄` (or of `X` when `do_center` is false), then `Y = X V_{1:k}`.
pub fn scheme2_with(
    x: &DataMatrix,
    k: usize,
    do_center: bool,
    opts: PcaOptions,
) -> Result<Embedding> {
    check_k(x, k)?;
    x.require_tall()?;
    let centered = center(x);
    let decomposition = if do_center { svd(&centered)? } else { svd(x)? };
    let model = PcaModel {
        projection: decomposition.v.leading_cols(k),
        mean: column_mean(x),
        scheme: if do_center { Scheme::SvdCentered } else { Scheme::SvdUncentered },
        spectrum: decomposition.squared(),
    };
    embed(x, &centered, model, opts)
}

fn embed(x: &DataMatrix, centered: &DataMatrix, model: PcaModel, opts: PcaOptions) -> Result<Embedding> {
    let source = if opts.project_centered { centered } else { x };
    let coords = source.matrix().matmul(&model.projection)?;
    Ok(Embedding { coords, model })
}

fn check_k(x: &DataMatrix, k: usize) -> Result<()> {
    if x.p() < 2 || k == 0 || k >= x.p() {
        return Err(Error::IndexViolation { index: k, lo: 1, hi: x.p().saturating_sub(1) });
    }
    Ok(())
}
