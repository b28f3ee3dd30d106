//! Orthogonal Procrustes alignment of two embeddings of the same points.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::svd_matrix;
use crate::matrix::Matrix;

#[derive(Clone, Debug)]
pub struct AlignmentResult {
    /// `k x k` orthogonal matrix applied to the second embedding.
    pub rotation: Matrix,
    /// Second embedding after centering, rotation and (optional) scaling.
    pub aligned: Matrix,
    /// First embedding after centering.
    pub reference: Matrix,
    pub rmsd: f64,
    /// Distance between each reference point and its aligned partner.
    pub per_point: Vec<f64>,
    /// 1 unless scaling was requested.
    pub scale: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlignmentSummary {
    pub rmsd: f64,
    pub max_displacement: f64,
    pub mean_displacement: f64,
    pub scale: f64,
    pub allow_scaling: bool,
    pub rotation_determinant_sign: f64,
    pub axis_correlations: Vec<f64>,
}

/// Subtracts column means.
pub fn normalize_embedding(y: &Matrix) -> Matrix {
    let (n, k) = y.shape();
    let mut out = y.clone();
    if n == 0 {
        return out;
    }
    for j in 0..k {
        let mean = (0..n).map(|i| y[(i, j)]).sum::<f64>() / n as f64;
        for i in 0..n {
            out[(i, j)] -= mean;
        }
    }
    out
}

pub fn procrustes(y: &Matrix, z: &Matrix) -> Result<AlignmentResult> {
    procrustes_with(y, z, false)
}

/// Rotates (and reflects) the centered `z` onto the centered `y`, minimizing
/// `‖Y - Z R‖_F` over orthogonal `R = U Vᵀ` from the SVD `ZᵀY = U Σ Vᵀ`.
/// With `allow_scaling` the aligned copy is also multiplied by the optimal
/// scalar `tr Σ / ‖Z‖²_F`.
pub fn procrustes_with(y: &Matrix, z: &Matrix, allow_scaling: bool) -> Result<AlignmentResult> {
    if y.shape() != z.shape() {
        return Err(Error::ShapeViolation(format!(
            "embeddings differ in shape: {:?} vs {:?}",
            y.shape(),
            z.shape()
        )));
    }
    let (n, k) = y.shape();
    if n == 0 || k == 0 || k > n {
        return Err(Error::ShapeViolation(format!(
            "need 1 <= k <= n for alignment, got n={n} k={k}"
        )));
    }
    if let Some((row, col)) = y.first_non_finite().or_else(|| z.first_non_finite()) {
        return Err(Error::NonFiniteInput { row, col });
    }
    let reference = normalize_embedding(y);
    let target = normalize_embedding(z);
    let cross = target.t_matmul(&reference)?;
    let dec = svd_matrix(&cross)?;
    let rotation = dec.u.matmul(&dec.v.transpose())?;
    let mut aligned = target.matmul(&rotation)?;
    let scale = if allow_scaling {
        let denom = target.frobenius_norm().powi(2);
        if denom > 0.0 {
            dec.sigma.iter().sum::<f64>() / denom
        } else {
            1.0
        }
    } else {
        1.0
    };
    if scale != 1.0 {
        aligned = aligned.scale(scale);
    }
    let per_point = reference.sub(&aligned)?.row_norms();
    let rmsd = (per_point.iter().map(|d| d * d).sum::<f64>() / n as f64).sqrt();
    Ok(AlignmentResult { rotation, aligned, reference, rmsd, per_point, scale })
}

impl AlignmentResult {
    /// Pearson correlation between matching columns of the reference and aligned embeddings.
    pub fn axis_correlations(&self) -> Vec<f64> {
        (0..self.reference.ncols())
            .map(|j| pearson(&self.reference.col(j), &self.aligned.col(j)))
            .collect()
    }

    pub fn summary(&self, allow_scaling: bool) -> AlignmentSummary {
        let n = self.per_point.len() as f64;
        AlignmentSummary {
            rmsd: self.rmsd,
            max_displacement: self.per_point.iter().copied().fold(0.0, f64::max),
            mean_displacement: self.per_point.iter().sum::<f64>() / n,
            scale: self.scale,
            allow_scaling,
            rotation_determinant_sign: determinant_sign(&self.rotation),
            axis_correlations: self.axis_correlations(),
        }
    }
}

/// Pearson correlation; 0 when either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return 0.0;
    }
    sab / (saa.sqrt() * sbb.sqrt())
}

/// Sign of the determinant by Gaussian elimination with partial pivoting.
fn determinant_sign(m: &Matrix) -> f64 {
    let n = m.nrows();
    let mut a = m.clone();
    let mut sign = 1.0;
    for c in 0..n {
        let pivot = (c..n).max_by(|&i, &j| a[(i, c)].abs().total_cmp(&a[(j, c)].abs())).unwrap_or(c);
        if a[(pivot, c)] == 0.0 {
            return 0.0;
        }
        if pivot != c {
            for j in 0..n {
                let t = a[(c, j)];
                a[(c, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
            }
            sign = -sign;
        }
        if a[(c, c)] < 0.0 {
            sign = -sign;
        }
        for i in c + 1..n {
            let f = a[(i, c)] / a[(c, c)];
            for j in c..n {
                a[(i, j)] -= f * a[(c, j)];
            }
        }
    }
    sign
}
