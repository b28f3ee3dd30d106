//! Dense symmetric eigendecomposition and SVD by Jacobi rotations.
//!
//! Both decompositions return values in non-increasing order (ties keep the
//! original index order) and canonical signs: the largest-magnitude entry of
//! every right/eigen vector is positive, the lowest index winning ties. With
//! that convention repeated runs on identical input are bit-identical.

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, DataMatrix, Matrix};

/// Relative off-diagonal size at which the Jacobi iterations stop.
pub const JACOBI_TOL: f64 = 1e-14;
/// Sweep cap for both Jacobi iterations.
pub const MAX_SWEEPS: usize = 100;
/// Singular values below `RANK_TOL * sigma_1` count as zero in rank queries.
pub const RANK_TOL: f64 = 1e-12;

/// Eigenpairs of a symmetric matrix; column `j` of `vectors` pairs with `values[j]`.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Thin SVD `X = U diag(sigma) Vᵀ` of an `n x p` matrix with `p <= n`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> Matrix {
        let mut us = self.u.clone();
        for i in 0..us.nrows() {
            for (x, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *x *= s;
            }
        }
        us.matmul(&self.v.transpose()).expect("thin svd shapes agree")
    }

    /// Number of singular values above `RANK_TOL * sigma_1`.
    pub fn rank(&self) -> usize {
        let cutoff = RANK_TOL * self.sigma.first().copied().unwrap_or(0.0);
        self.sigma.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn squared(&self) -> Vec<f64> {
        self.sigma.iter().map(|s| s * s).collect()
    }

    /// Sum of the `k` largest squared singular values.
    pub fn partial_sum(&self, k: usize) -> Result<f64> {
        let p = self.sigma.len();
        if k == 0 || k > p {
            return Err(Error::IndexViolation { index: k, lo: 1, hi: p });
        }
        Ok(self.sigma[..k].iter().map(|s| s * s).sum())
    }

    pub fn right_vector(&self, j: usize) -> Vec<f64> {
        self.v.col(j)
    }

    pub fn left_vector(&self, j: usize) -> Vec<f64> {
        self.u.col(j)
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigh(s: &Matrix) -> Result<EigResult> {
    if !s.is_square() {
        return Err(Error::InvalidMatrix(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            s.nrows(),
            s.ncols()
        )));
    }
    if let Some((row, col)) = s.first_non_finite() {
        return Err(Error::NonFiniteInput { row, col });
    }
    let n = s.nrows();
    let sym_tol = 1e-12 * s.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (s[(i, j)] - s[(j, i)]).abs() > sym_tol {
                return Err(Error::InvalidMatrix(format!(
                    "not symmetric at ({i}, {j}): {} vs {}",
                    s[(i, j)],
                    s[(j, i)]
                )));
            }
        }
    }

    let mut a = s.clone();
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = m;
            a[(j, i)] = m;
        }
    }
    let mut v = Matrix::identity(n);
    let target = JACOBI_TOL * a.frobenius_norm();

    let mut sweep = 0;
    while off_diagonal_norm(&a) > target {
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { routine: "jacobi_eigh", iterations: sweep });
        }
        sweep += 1;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (c, s) = jacobi_rotation(a[(p, p)], a[(q, q)], apq);
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let order = descending_order(&diag);
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_col(dst, &v.col(src));
    }
    canonicalize_columns(&mut vectors);
    Ok(EigResult { values, vectors })
}

/// Thin SVD by one-sided (Hestenes) Jacobi on the columns of `x`.
///
/// Column pairs are rotated until every pair is orthogonal to relative
/// precision, so `XᵀX` is never formed.
pub fn svd(x: &DataMatrix) -> Result<SvdResult> {
    svd_matrix(x.matrix())
}

/// Same as [`svd`] for an arbitrary matrix with at least as many rows as columns.
pub fn svd_matrix(x: &Matrix) -> Result<SvdResult> {
    let (n, p) = x.shape();
    if p > n {
        return Err(Error::ShapeViolation(format!(
            "svd needs at least as many rows as columns, got {n}x{p}"
        )));
    }
    if let Some((row, col)) = x.first_non_finite() {
        return Err(Error::NonFiniteInput { row, col });
    }

    let mut cols: Vec<Vec<f64>> = (0..p).map(|j| x.col(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..p)
        .map(|j| {
            let mut e = vec![0.0; p];
            e[j] = 1.0;
            e
        })
        .collect();
    // Rounding in an n-term dot product limits how orthogonal two columns can get.
    let tol = JACOBI_TOL.max(n as f64 * f64::EPSILON);

    let mut sweep = 0;
    loop {
        let mut rotated = false;
        for i in 0..p.saturating_sub(1) {
            for j in i + 1..p {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(&cols[i], &cols[j]);
                if gamma.abs() <= tol * (alpha.sqrt() * beta.sqrt()) {
                    continue;
                }
                rotated = true;
                let (c, s) = jacobi_rotation(alpha, beta, gamma);
                rotate_pair(&mut cols, i, j, c, s);
                rotate_pair(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            break;
        }
        sweep += 1;
        if sweep == MAX_SWEEPS {
            return Err(Error::ConvergenceFailure { routine: "svd", iterations: sweep });
        }
    }

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let order = descending_order(&norms);
    let sigma: Vec<f64> = order.iter().map(|&i| norms[i]).collect();
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut missing = Vec::new();
    for (dst, &src) in order.iter().enumerate() {
        if sigma[dst] > 0.0 {
            u_cols.push(cols[src].iter().map(|x| x / sigma[dst]).collect());
        } else {
            u_cols.push(vec![0.0; n]);
            missing.push(dst);
        }
    }
    complete_orthonormal(&mut u_cols, &missing);

    let mut vm = Matrix::zeros(p, p);
    for (dst, &src) in order.iter().enumerate() {
        vm.set_col(dst, &v[src]);
    }
    let flips = canonicalize_columns(&mut vm);
    let mut u = Matrix::from_columns(&u_cols)?;
    for (j, flipped) in flips.into_iter().enumerate() {
        if flipped {
            for i in 0..n {
                u[(i, j)] = -u[(i, j)];
            }
        }
    }
    Ok(SvdResult { u, sigma, v: vm })
}

/// `XᵀX`, computed on the upper triangle and mirrored.
pub fn gram(x: &DataMatrix) -> Matrix {
    let m = x.matrix();
    let p = m.ncols();
    let mut g = Matrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let s: f64 = (0..m.nrows()).map(|r| m[(r, i)] * m[(r, j)]).sum();
            g[(i, j)] = s;
            g[(j, i)] = s;
        }
    }
    g
}

/// Sum of the `k` largest squared singular values of `x`.
pub fn partial_spectral_sum(x: &DataMatrix, k: usize) -> Result<f64> {
    let p = x.p();
    if k == 0 || k > p {
        return Err(Error::IndexViolation { index: k, lo: 1, hi: p });
    }
    svd(x)?.partial_sum(k)
}

/// Cosines of the principal angles between the column spans of two
/// matrices with orthonormal columns, largest first.
pub fn principal_cosines(a: &Matrix, b: &Matrix) -> Result<Vec<f64>> {
    let m = a.t_matmul(b)?;
    let m = if m.nrows() >= m.ncols() { m } else { m.transpose() };
    Ok(svd_matrix(&m)?.sigma.into_iter().map(|c| c.min(1.0)).collect())
}

/// Flips each column so that its largest-magnitude entry is positive
/// (first occurrence on ties). Returns which columns were flipped.
pub fn canonicalize_columns(m: &mut Matrix) -> Vec<bool> {
    let (rows, cols) = m.shape();
    let mut flips = vec![false; cols];
    for (j, flip) in flips.iter_mut().enumerate() {
        let mut best = 0;
        let mut best_abs = -1.0;
        for i in 0..rows {
            let a = m[(i, j)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if rows > 0 && m[(best, j)] < 0.0 {
            *flip = true;
            for i in 0..rows {
                m[(i, j)] = -m[(i, j)];
            }
        }
    }
    flips
}

/// Indices sorting `values` into non-increasing order; equal values keep index order.
fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

/// Cosine and sine of the rotation annihilating the off-diagonal of
/// `[[app, apq], [apq, aqq]]`, taking the smaller rotation angle.
fn jacobi_rotation(app: f64, aqq: f64, apq: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + theta.hypot(1.0))
    };
    let c = 1.0 / t.hypot(1.0);
    (c, t * c)
}

fn rotate_pair(cols: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    let (left, right) = cols.split_at_mut(j);
    for (a, b) in left[i].iter_mut().zip(right[0].iter_mut()) {
        let (x, y) = (*a, *b);
        *a = c * x - s * y;
        *b = s * x + c * y;
    }
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[(i, j)] * a[(i, j)];
            }
        }
    }
    sum.sqrt()
}

/// Fills the columns listed in `missing` with unit vectors orthogonal to every
/// other column, drawing candidates from the standard basis.
pub(crate) fn complete_orthonormal(cols: &mut [Vec<f64>], missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = cols[0].len();
    let mut filled: Vec<usize> = (0..cols.len()).filter(|j| !missing.contains(j)).collect();
    let mut candidate = 0;
    for &slot in missing {
        while candidate < n {
            let mut e = vec![0.0; n];
            e[candidate] = 1.0;
            candidate += 1;
            for _ in 0..2 {
                for &f in &filled {
                    let proj = dot(&cols[f], &e);
                    for (x, y) in e.iter_mut().zip(&cols[f]) {
                        *x -= proj * y;
                    }
                }
            }
            let len = norm(&e);
            if len > 0.5 {
                cols[slot] = e.into_iter().map(|x| x / len).collect();
                filled.push(slot);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_its_own_decomposition() {
        let r = jacobi_eigh(&Matrix::identity(3)).unwrap();
        assert_eq!(r.values, vec![1.0, 1.0, 1.0]);
        assert_eq!(r.vectors, Matrix::identity(3));
    }

    #[test]
    fn diagonal_input_sorts_with_permutation_vectors() {
        let r = jacobi_eigh(&Matrix::from_diag(&[4.0, 9.0, 1.0])).unwrap();
        assert_eq!(r.values, vec![9.0, 4.0, 1.0]);
        let expected = Matrix::from_rows(&[[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(r.vectors, expected);
    }

    #[test]
    fn eigh_rejects_bad_input() {
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(jacobi_eigh(&rect), Err(Error::InvalidMatrix(_))));
        let asym = Matrix::from_rows(&[[1.0, 2.0], [2.5, 1.0]]).unwrap();
        assert!(matches!(jacobi_eigh(&asym), Err(Error::InvalidMatrix(_))));
        let nan = Matrix::from_rows(&[[1.0, f64::NAN], [f64::NAN, 1.0]]).unwrap();
        assert!(matches!(jacobi_eigh(&nan), Err(Error::NonFiniteInput { .. })));
    }

    #[test]
    fn svd_of_orthogonal_columns() {
        // columns (3,4,0) and (0,0,2): norms 5 and 2
        let x = DataMatrix::from_rows(&[[3.0, 0.0], [4.0, 0.0], [0.0, 2.0]]).unwrap();
        let r = svd(&x).unwrap();
        assert_eq!(r.sigma, vec![5.0, 2.0]);
    }

    #[test]
    fn svd_of_embedded_identity() {
        let x = DataMatrix::from_rows(&[
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, 0.0],
        ])
        .unwrap();
        let r = svd(&x).unwrap();
        assert_eq!(r.sigma, vec![1.0, 1.0, 1.0]);
        assert!(r.u.orthonormality_error() < 1e-15);
    }

    #[test]
    fn svd_rejects_wide_input() {
        let x = DataMatrix::from_rows(&[[1.0, 2.0, 3.0]]).unwrap();
        assert!(matches!(svd(&x), Err(Error::ShapeViolation(_))));
    }

    #[test]
    fn svd_completes_left_vectors_for_zero_columns() {
        let x = DataMatrix::from_rows(&[[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).unwrap();
        let r = svd(&x).unwrap();
        assert_eq!(r.sigma[1], 0.0);
        assert_eq!(r.rank(), 1);
        assert!(r.u.orthonormality_error() < 1e-15);
        assert!(r.reconstruct().sub(x.matrix()).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn gram_small_cases() {
        let i2 = DataMatrix::new(Matrix::identity(2)).unwrap();
        assert_eq!(gram(&i2), Matrix::identity(2));
        let col = DataMatrix::from_rows(&[[1.0], [1.0]]).unwrap();
        assert_eq!(gram(&col).as_slice(), &[2.0]);
    }

    #[test]
    fn partial_sums_of_diagonal() {
        let x = DataMatrix::from_rows(&[[3.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        assert_eq!(partial_spectral_sum(&x, 1).unwrap(), 9.0);
        assert_eq!(partial_spectral_sum(&x, 2).unwrap(), 10.0);
        assert!(matches!(
            partial_spectral_sum(&x, 0),
            Err(Error::IndexViolation { index: 0, .. })
        ));
        assert!(matches!(
            partial_spectral_sum(&x, 3),
            Err(Error::IndexViolation { index: 3, .. })
        ));
    }

    #[test]
    fn canonical_sign_tie_goes_to_lowest_index() {
        let mut m = Matrix::from_rows(&[[-0.5], [0.5]]).unwrap();
        assert_eq!(canonicalize_columns(&mut m), vec![true]);
        assert_eq!(m.col(0), vec![0.5, -0.5]);
    }
}
