//! Seeded synthetic datasets that satisfy a chosen hypothesis by construction.
//!
//! Centered parts are built as `Ū diag(σ̄) V̄ᵀ` where the columns of `Ū` are
//! orthonormal and orthogonal to `1ₙ`, so the column means vanish and the
//! centered singular values and vectors are known exactly. Every dataset is
//! re-checked from scratch before it is returned.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::diagnostics::{mean_norm_threshold, parallel_check, PARALLEL_TOL};
use crate::error::{Error, Result};
use crate::linalg::svd;
use crate::matrix::{dot, norm, DataMatrix, Matrix};
use crate::pca::{center, column_mean};

pub const MAX_ATTEMPTS: usize = 10;
/// Minimum ratio `‖x̄‖² / threshold` for `LargeMean` and `LowRank`.
pub const LARGE_MEAN_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    /// Top centered singular direction equals the mean direction.
    ParallelMean,
    /// Mean orthogonal to the top centered singular direction.
    OrthogonalMean,
    /// Mean norm at least twice the cap threshold for the configured `epsilon`.
    LargeMean,
    /// Centered part of exact rank `k_rank`, with a large mean.
    LowRank,
    /// Gaussian noise plus a random mean.
    Generic,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 5] = [
        SyntheticKind::ParallelMean,
        SyntheticKind::OrthogonalMean,
        SyntheticKind::LargeMean,
        SyntheticKind::LowRank,
        SyntheticKind::Generic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::ParallelMean => "parallel_mean",
            SyntheticKind::OrthogonalMean => "orthogonal_mean",
            SyntheticKind::LargeMean => "large_mean",
            SyntheticKind::LowRank => "low_rank",
            SyntheticKind::Generic => "generic",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SyntheticKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown synthetic kind {s:?}"))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    pub p: usize,
    /// Rank of the centered part for `LowRank`.
    pub k_rank: usize,
    /// `‖x̄‖` for parallel, orthogonal and generic data; the ratio
    /// `‖x̄‖² / threshold` (at least 2) for large-mean and low-rank data.
    pub mean_scale: f64,
    /// Scale of the centered part.
    pub noise_scale: f64,
    /// `ε` used for the threshold of `LargeMean` and `LowRank`.
    pub epsilon: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n: usize, p: usize, seed: u64) -> Self {
        let mean_scale = match kind {
            SyntheticKind::LargeMean | SyntheticKind::LowRank => LARGE_MEAN_FACTOR,
            _ => 1.0,
        };
        SyntheticSpec {
            kind,
            n,
            p,
            k_rank: (p / 2).max(1),
            mean_scale,
            noise_scale: 1.0,
            epsilon: 0.1,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMatrix(msg));
        if self.p == 0 || self.p >= self.n {
            return bad(format!("need 1 <= p < n, got n={} p={}", self.n, self.p));
        }
        if self.kind == SyntheticKind::OrthogonalMean && self.p < 2 {
            return bad("orthogonal_mean needs p >= 2".into());
        }
        if self.kind == SyntheticKind::LowRank && (self.k_rank == 0 || self.k_rank >= self.p) {
            return bad(format!("low_rank needs 1 <= k_rank < p, got {}", self.k_rank));
        }
        if !(self.mean_scale.is_finite() && self.mean_scale > 0.0) {
            return bad(format!("mean_scale must be positive, got {}", self.mean_scale));
        }
        if !(self.noise_scale.is_finite() && self.noise_scale > 0.0) {
            return bad(format!("noise_scale must be positive, got {}", self.noise_scale));
        }
        if matches!(self.kind, SyntheticKind::LargeMean | SyntheticKind::LowRank) {
            if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
                return Err(Error::InvalidEpsilon(self.epsilon));
            }
            if self.mean_scale < LARGE_MEAN_FACTOR {
                return bad(format!("mean_scale must be at least {LARGE_MEAN_FACTOR} for {}", self.kind));
            }
        }
        Ok(())
    }
}

/// Generates and self-verifies a dataset; a failed verification retries with
/// a derived seed, up to [`MAX_ATTEMPTS`] times.
pub fn generate(spec: &SyntheticSpec) -> Result<DataMatrix> {
    spec.validate()?;
    let mut last = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let seed = spec.seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = build(spec, &mut rng)?;
        match verify(spec, &x) {
            Ok(()) => return Ok(x),
            Err(reason) => last = reason,
        }
    }
    Err(Error::GenerationFailure { attempts: MAX_ATTEMPTS, reason: last })
}

fn build(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<DataMatrix> {
    let (n, p) = (spec.n, spec.p);
    match spec.kind {
        SyntheticKind::ParallelMean | SyntheticKind::OrthogonalMean => {
            let v = random_orthogonal(p, rng);
            let sigma = decreasing_spectrum(p, spec, rng);
            let centered = structured(n, &sigma, &v, rng)?;
            let dir = if spec.kind == SyntheticKind::ParallelMean { 0 } else { 1 };
            let mean: Vec<f64> = v.col(dir).iter().map(|x| x * spec.mean_scale).collect();
            shift(centered, &mean)
        }
        SyntheticKind::LargeMean => {
            let centered = gaussian_centered(n, p, spec.noise_scale, rng);
            let sigma = svd(&DataMatrix::new(centered.clone())?)?.sigma;
            let threshold = mean_norm_threshold(&sigma, n, spec.epsilon)?;
            let mean = scaled_direction(p, (spec.mean_scale * threshold * (1.0 + 1e-9)).sqrt(), rng);
            shift(centered, &mean)
        }
        SyntheticKind::LowRank => {
            let v = random_orthogonal(p, rng);
            let mut sigma = decreasing_spectrum(p, spec, rng);
            sigma[spec.k_rank..].iter_mut().for_each(|s| *s = 0.0);
            let centered = structured(n, &sigma, &v, rng)?;
            let threshold = mean_norm_threshold(&sigma, n, spec.epsilon)?;
            let mean = scaled_direction(p, (spec.mean_scale * threshold * (1.0 + 1e-9)).sqrt(), rng);
            shift(centered, &mean)
        }
        SyntheticKind::Generic => {
            let mut m = Matrix::zeros(n, p);
            for i in 0..n {
                for v in m.row_mut(i) {
                    *v = spec.noise_scale * sample_normal(rng);
                }
            }
            let mean = scaled_direction(p, spec.mean_scale, rng);
            shift(m, &mean)
        }
    }
}

fn verify(spec: &SyntheticSpec, x: &DataMatrix) -> std::result::Result<(), String> {
    let fail = |e: Error| e.to_string();
    match spec.kind {
        SyntheticKind::ParallelMean => {
            let c = parallel_check(x, PARALLEL_TOL).map_err(fail)?;
            if !c.is_parallel {
                return Err(format!("parallel cosine {} below 1 - {PARALLEL_TOL}", c.cosine));
            }
        }
        SyntheticKind::OrthogonalMean => {
            let c = parallel_check(x, PARALLEL_TOL).map_err(fail)?;
            if c.cosine > PARALLEL_TOL {
                return Err(format!("orthogonal cosine {} above {PARALLEL_TOL}", c.cosine));
            }
        }
        SyntheticKind::LargeMean | SyntheticKind::LowRank => {
            let centered = svd(&center(x)).map_err(fail)?;
            let threshold = mean_norm_threshold(&centered.sigma, x.n(), spec.epsilon).map_err(fail)?;
            let mean_sq = norm(&column_mean(x)).powi(2);
            if mean_sq < LARGE_MEAN_FACTOR * threshold {
                return Err(format!("mean norm² {mean_sq} below {LARGE_MEAN_FACTOR} x threshold {threshold}"));
            }
            if spec.kind == SyntheticKind::LowRank && centered.rank() != spec.k_rank {
                return Err(format!("centered rank {} != {}", centered.rank(), spec.k_rank));
            }
        }
        SyntheticKind::Generic => {
            if norm(&column_mean(x)) == 0.0 {
                return Err("zero mean".into());
            }
        }
    }
    Ok(())
}

fn sample_normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Strictly decreasing values `noise_scale √n (p - i + u_i/2) / p` with `u_i ∈ [0, 1)`.
fn decreasing_spectrum(p: usize, spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let scale = spec.noise_scale * (spec.n as f64).sqrt() / p as f64;
    (0..p).map(|i| scale * ((p - i) as f64 + 0.5 * rng.random::<f64>())).collect()
}

/// Random unit direction times `length`.
fn scaled_direction(p: usize, length: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..p).map(|_| sample_normal(rng)).collect();
        let len = norm(&v);
        if len > 1e-3 {
            return v.into_iter().map(|x| x * length / len).collect();
        }
    }
}

/// Modified Gram-Schmidt, applied twice, on a Gaussian matrix.
fn random_orthogonal(p: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let cols: Vec<Vec<f64>> = (0..p).map(|_| (0..p).map(|_| sample_normal(rng)).collect()).collect();
    Matrix::from_columns(&orthonormalize(cols, None)).expect("square")
}

/// `n x r` orthonormal columns orthogonal to `1ₙ`.
fn centered_orthonormal(n: usize, r: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let ones = vec![1.0 / (n as f64).sqrt(); n];
    let cols = (0..r).map(|_| (0..n).map(|_| sample_normal(rng)).collect()).collect();
    orthonormalize(cols, Some(&ones))
}

fn orthonormalize(mut cols: Vec<Vec<f64>>, against: Option<&[f64]>) -> Vec<Vec<f64>> {
    for j in 0..cols.len() {
        for _ in 0..2 {
            if let Some(a) = against {
                let proj = dot(&cols[j], a);
                cols[j].iter_mut().zip(a).for_each(|(x, y)| *x -= proj * y);
            }
            for i in 0..j {
                let proj = dot(&cols[j], &cols[i]);
                let prev = cols[i].clone();
                cols[j].iter_mut().zip(&prev).for_each(|(x, y)| *x -= proj * y);
            }
        }
        let len = norm(&cols[j]);
        cols[j].iter_mut().for_each(|x| *x /= len);
    }
    cols
}

/// `Ū diag(sigma) Vᵀ` with `Ū` orthogonal to `1ₙ`.
fn structured(n: usize, sigma: &[f64], v: &Matrix, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let p = sigma.len();
    let u = centered_orthonormal(n, p, rng);
    let mut us = Matrix::zeros(n, p);
    for (j, col) in u.iter().enumerate() {
        for (i, &x) in col.iter().enumerate() {
            us[(i, j)] = x * sigma[j];
        }
    }
    us.matmul(&v.transpose())
}

fn gaussian_centered(n: usize, p: usize, scale: f64, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::zeros(n, p);
    for i in 0..n {
        for v in m.row_mut(i) {
            *v = scale * sample_normal(rng);
        }
    }
    center(&DataMatrix::new(m).expect("finite")).into_matrix()
}

fn shift(mut m: Matrix, mean: &[f64]) -> Result<DataMatrix> {
    for i in 0..m.nrows() {
        m.row_mut(i).iter_mut().zip(mean).for_each(|(x, mu)| *x += mu);
    }
    DataMatrix::new(m)
}
