#![allow(dead_code)]

use centerlab::matrix::{DataMatrix, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

pub fn gaussian(n: usize, p: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let data = (0..n * p).map(|_| normal(rng)).collect();
    Matrix::from_row_major(n, p, data).unwrap()
}

pub fn gaussian_data(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DataMatrix {
    DataMatrix::new(gaussian(n, p, rng)).unwrap()
}

/// Gaussian data shifted by a random mean of norm between 0.5 and 3.
pub fn shifted_data(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DataMatrix {
    let mut m = gaussian(n, p, rng);
    let shift: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
    let len = shift.iter().map(|v| v * v).sum::<f64>().sqrt();
    let target = rng.random_range(0.5..3.0);
    for i in 0..n {
        for (v, s) in m.row_mut(i).iter_mut().zip(&shift) {
            *v += s * target / len;
        }
    }
    DataMatrix::new(m).unwrap()
}

/// Haar-ish orthogonal matrix from classical Gram-Schmidt on Gaussian columns, computed independently of the library.
pub fn random_orthogonal(k: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    while cols.len() < k {
        let mut v: Vec<f64> = (0..k).map(|_| normal(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
        }
        let len = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if len > 1e-8 {
            cols.push(v.into_iter().map(|a| a / len).collect());
        }
    }
    Matrix::from_columns(&cols).unwrap()
}

/// Flips each column so the entry of largest magnitude is positive.
pub fn canonical(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    for j in 0..m.ncols() {
        let col = m.col(j);
        let mut best = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            let flipped: Vec<f64> = col.iter().map(|v| -v).collect();
            out.set_col(j, &flipped);
        }
    }
    out
}

/// Eigenvalues of a symmetric matrix by Sturm-sequence bisection on its LDLᵀ inertia,
/// an oracle that shares no code with the rotation-based solvers.
pub fn sturm_eigenvalues(s: &Matrix) -> Vec<f64> {
    let n = s.nrows();
    let radius = (0..n)
        .map(|i| (0..n).map(|j| s[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut out = Vec::with_capacity(n);
    // the i-th largest eigenvalue is the point where count_below crosses n - i
    for i in 0..n {
        let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if count_below(s, mid) >= n - i {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * (1.0 + radius) {
                break;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    out
}

/// Number of eigenvalues below `shift`: negative pivots of symmetric Gaussian
/// elimination on `S - shift I` with complete diagonal pivoting.
fn count_below(s: &Matrix, shift: f64) -> usize {
    let n = s.nrows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s[(i, j)] - if i == j { shift } else { 0.0 }).collect()).collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut negatives = 0;
    while !active.is_empty() {
        let (pos, &piv) = active
            .iter()
            .enumerate()
            .max_by(|(_, &x), (_, &y)| a[x][x].abs().total_cmp(&a[y][y].abs()))
            .unwrap();
        let d = a[piv][piv];
        active.remove(pos);
        if d == 0.0 {
            continue;
        }
        if d < 0.0 {
            negatives += 1;
        }
        for &i in &active {
            let f = a[i][piv] / d;
            for &j in &active {
                a[i][j] -= f * a[piv][j];
            }
        }
    }
    negatives
}
