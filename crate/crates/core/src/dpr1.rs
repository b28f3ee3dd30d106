//! Eigenpairs of diagonal-plus-rank-one matrices `D + ρ μ μᵀ`.
//!
//! After deflation the diagonal is strictly decreasing and every `μ_j` is
//! nonzero. The eigenvalues are then the roots of the secular function
//!
//! ```text
//! w(λ) = 1 + ρ Σ_j μ_j² / (d_j - λ)
//! ```
//!
//! one in each interval `(d_j, d_{j-1})` and one in `(d_1, d_1 + ρ μᵀμ)`, with
//! eigenvectors proportional to `(D - λ I)⁻¹ μ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::canonicalize_columns;
use crate::matrix::{norm, Matrix};

pub const DEFLATION_TOL: f64 = 1e-12;
pub const MAX_ROOT_ITERATIONS: usize = 200;
/// Bisection narrows a bracket to this fraction of its width before Newton takes over.
const BISECTION_WIDTH: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dpr1Problem {
    pub d: Vec<f64>,
    pub rho: f64,
    pub mu: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Dpr1Spectrum {
    /// Eigenvalues, non-increasing.
    pub values: Vec<f64>,
    /// Orthogonal `p x p` matrix; column `j` pairs with `values[j]`.
    pub vectors: Matrix,
    /// Original indices whose eigenpair came out of deflation rather than the secular equation.
    pub deflated: Vec<usize>,
}

/// A coordinate removed by deflation, with its exact eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct DeflatedPair {
    /// Index in the original problem.
    pub index: usize,
    pub value: f64,
    /// Eigenvector in original coordinates.
    pub vector: Vec<f64>,
}

/// Maps the reduced problem back into original coordinates.
#[derive(Clone, Debug)]
pub struct DeflationRecord {
    /// Columns are orthonormal vectors in original coordinates; the reduced
    /// problem lives on the columns listed in `kept`.
    pub basis: Matrix,
    pub kept: Vec<usize>,
    pub pairs: Vec<DeflatedPair>,
}

impl DeflationRecord {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Lifts an eigenvector of the reduced problem to original coordinates.
    pub fn lift(&self, reduced: &[f64]) -> Vec<f64> {
        let p = self.basis.nrows();
        let mut out = vec![0.0; p];
        for (&col, &y) in self.kept.iter().zip(reduced) {
            for (i, o) in out.iter_mut().enumerate() {
                *o += y * self.basis[(i, col)];
            }
        }
        out
    }
}

impl Dpr1Problem {
    pub fn new(d: Vec<f64>, rho: f64, mu: Vec<f64>) -> Result<Self> {
        let prob = Dpr1Problem { d, rho, mu };
        prob.validate()?;
        Ok(prob)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d.is_empty() {
            return Err(Error::InvalidProblem("empty diagonal".into()));
        }
        if self.d.len() != self.mu.len() {
            return Err(Error::InvalidProblem(format!(
                "diagonal has {} entries but mu has {}",
                self.d.len(),
                self.mu.len()
            )));
        }
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::InvalidProblem(format!("rho must be positive, got {}", self.rho)));
        }
        if let Some(i) = self.d.iter().chain(&self.mu).position(|x| !x.is_finite()) {
            return Err(Error::InvalidProblem(format!("non-finite entry at position {i}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn mu_norm_sq(&self) -> f64 {
        self.mu.iter().map(|m| m * m).sum()
    }

    /// `max d + ρ μᵀμ`, the upper end of the top bracket.
    pub fn upper_bound(&self) -> f64 {
        self.d.iter().copied().fold(f64::NEG_INFINITY, f64::max) + self.rho * self.mu_norm_sq()
    }

    /// Scale used for residual tolerances: `max |d| + ρ μᵀμ`.
    pub fn scale(&self) -> f64 {
        self.d.iter().fold(0.0_f64, |m, x| m.max(x.abs())) + self.rho * self.mu_norm_sq()
    }

    /// `D + ρ μ μᵀ` as a dense matrix.
    pub fn dense(&self) -> Matrix {
        let p = self.dim();
        let mut m = Matrix::from_diag(&self.d);
        for i in 0..p {
            for j in 0..p {
                m[(i, j)] += self.rho * self.mu[i] * self.mu[j];
            }
        }
        m
    }

    /// Whether the diagonal is strictly decreasing with all `μ_j` nonzero.
    pub fn is_nondegenerate(&self) -> bool {
        self.d.windows(2).all(|w| w[0] > w[1]) && self.mu.iter().all(|&m| m != 0.0)
    }
}

/// Secular function `w(λ)`, summed with Neumaier compensation.
pub fn secular(lambda: f64, prob: &Dpr1Problem) -> Result<f64> {
    for (index, &pole) in prob.d.iter().enumerate() {
        let gap = (pole - lambda).abs();
        if gap <= f64::EPSILON * pole.abs().max(lambda.abs()) {
            return Err(Error::PoleEvaluation { index, pole });
        }
    }
    let mut sum = CompensatedSum::new(1.0);
    for (&dj, &mj) in prob.d.iter().zip(&prob.mu) {
        sum.add(prob.rho * mj * mj / (dj - lambda));
    }
    Ok(sum.value())
}

/// Removes coordinates that violate the secular-equation hypotheses.
///
/// Entries with `|μ_j| <= tol ‖μ‖` become eigenpairs `(d_j, e_j)`. Diagonal
/// entries closer than `tol (max|d| + 1)` are merged by a plane rotation that
/// moves all of their `μ` weight onto one coordinate. The reduced problem is
/// sorted with a strictly decreasing diagonal.
pub fn deflate(prob: &Dpr1Problem, tol: f64) -> (Dpr1Problem, DeflationRecord) {
    let p = prob.dim();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| prob.d[b].total_cmp(&prob.d[a]));

    // basis column k is e_{order[k]}; rotations below mix columns in place
    let mut basis = Matrix::zeros(p, p);
    for (k, &orig) in order.iter().enumerate() {
        basis[(orig, k)] = 1.0;
    }
    let d: Vec<f64> = order.iter().map(|&i| prob.d[i]).collect();
    let mut mu: Vec<f64> = order.iter().map(|&i| prob.mu[i]).collect();

    let mu_cut = tol * norm(&prob.mu);
    let gap_cut = tol * (d.iter().fold(0.0_f64, |m, x| m.max(x.abs())) + 1.0);
    let mut deflated = vec![false; p];
    for k in 0..p {
        if mu[k].abs() <= mu_cut {
            mu[k] = 0.0;
            deflated[k] = true;
        }
    }

    let mut anchor: Option<usize> = None;
    for k in 0..p {
        if deflated[k] {
            continue;
        }
        match anchor {
            Some(a) if d[a] - d[k] <= gap_cut => {
                let r = mu[a].hypot(mu[k]);
                let (c, s) = (mu[a] / r, mu[k] / r);
                for i in 0..p {
                    let (ba, bk) = (basis[(i, a)], basis[(i, k)]);
                    basis[(i, a)] = c * ba + s * bk;
                    basis[(i, k)] = -s * ba + c * bk;
                }
                mu[a] = r;
                mu[k] = 0.0;
                deflated[k] = true;
            }
            _ => anchor = Some(k),
        }
    }

    let kept: Vec<usize> = (0..p).filter(|&k| !deflated[k]).collect();
    let pairs = (0..p)
        .filter(|&k| deflated[k])
        .map(|k| DeflatedPair { index: order[k], value: d[k], vector: basis.col(k) })
        .collect();
    let reduced = Dpr1Problem {
        d: kept.iter().map(|&k| d[k]).collect(),
        rho: prob.rho,
        mu: kept.iter().map(|&k| mu[k]).collect(),
    };
    (reduced, DeflationRecord { basis, kept, pairs })
}

pub fn solve(prob: &Dpr1Problem) -> Result<Dpr1Spectrum> {
    solve_with_tol(prob, DEFLATION_TOL)
}

/// Full eigendecomposition: deflation, then one secular root per bracket.
pub fn solve_with_tol(prob: &Dpr1Problem, tol: f64) -> Result<Dpr1Spectrum> {
    prob.validate()?;
    let p = prob.dim();
    let (reduced, record) = deflate(prob, tol);

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(p);
    for j in 0..reduced.dim() {
        let root = secular_root(&reduced, j)?;
        pairs.push((root.lambda, record.lift(&root.vector)));
    }
    for dp in &record.pairs {
        pairs.push((dp.value, dp.vector.clone()));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut vectors = Matrix::zeros(p, p);
    for (j, (_, v)) in pairs.iter().enumerate() {
        vectors.set_col(j, v);
    }
    canonicalize_columns(&mut vectors);
    let mut deflated: Vec<usize> = record.pairs.iter().map(|dp| dp.index).collect();
    deflated.sort_unstable();
    Ok(Dpr1Spectrum { values: pairs.into_iter().map(|(v, _)| v).collect(), vectors, deflated })
}

/// Checks `d_p < λ_p < d_{p-1} < ... < d_1 < λ_1 < d_1 + ρ μᵀμ` for
/// eigenvalues sorted in non-increasing order.
pub fn strictly_separated(prob: &Dpr1Problem, values: &[f64]) -> bool {
    let mut d = prob.d.clone();
    d.sort_by(|a, b| b.total_cmp(a));
    if values.len() != d.len() {
        return false;
    }
    values[0] < prob.upper_bound()
        && values.iter().zip(&d).all(|(l, dj)| l > dj)
        && values.iter().skip(1).zip(&d).all(|(l, dprev)| l < dprev)
}

/// One root of the secular equation and its unnormalized-then-normalized eigenvector.
#[derive(Clone, Debug)]
pub struct SecularRoot {
    pub lambda: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Root in bracket `j` of a non-degenerate problem whose diagonal is sorted
/// strictly decreasing: `(d_j, d_{j-1})`, or `(d_0, d_0 + ρ μᵀμ)` for `j = 0`.
///
/// The iteration runs in the shifted variable `τ = λ - origin`, where the
/// origin is the pole nearest the root, so the differences `d_i - λ` used
/// for the eigenvector keep their relative accuracy.
pub fn secular_root(prob: &Dpr1Problem, j: usize) -> Result<SecularRoot> {
    let lo = prob.d[j];
    let hi = if j == 0 { lo + prob.rho * prob.mu_norm_sq() } else { prob.d[j - 1] };
    if prob.dim() == 1 {
        let lambda = hi;
        return Ok(SecularRoot { lambda, vector: vec![-prob.mu[0].signum()], iterations: 0 });
    }

    let width = hi - lo;
    let half = 0.5 * width;
    // w is increasing on the bracket: positive at the midpoint means the root is in the lower half.
    let mid_value = shifted_secular(prob, lo, half);
    if mid_value == 0.0 {
        return Ok(finish(prob, lo, half, 0));
    }
    let (origin, mut tlo, mut thi) = if j == 0 {
        (lo, 0.0, width)
    } else if mid_value > 0.0 {
        (lo, 0.0, half)
    } else {
        (hi, -half, 0.0)
    };

    let mut iterations = 0;
    let bump = |iterations: &mut usize| -> Result<()> {
        *iterations += 1;
        if *iterations > MAX_ROOT_ITERATIONS {
            return Err(Error::ConvergenceFailure {
                routine: "secular_root",
                iterations: MAX_ROOT_ITERATIONS,
            });
        }
        Ok(())
    };

    while thi - tlo > BISECTION_WIDTH * width {
        bump(&mut iterations)?;
        let tm = 0.5 * (tlo + thi);
        let f = shifted_secular(prob, origin, tm);
        if f == 0.0 {
            return Ok(finish(prob, origin, tm, iterations));
        }
        if f < 0.0 {
            tlo = tm;
        } else {
            thi = tm;
        }
    }

    let mut tau = 0.5 * (tlo + thi);
    loop {
        bump(&mut iterations)?;
        let (f, df) = shifted_secular_with_derivative(prob, origin, tau);
        if f == 0.0 {
            break;
        }
        if f < 0.0 {
            tlo = tau;
        } else {
            thi = tau;
        }
        let newton = tau - f / df;
        let next = if newton > tlo && newton < thi && newton.is_finite() {
            newton
        } else {
            0.5 * (tlo + thi)
        };
        let converged = (next - tau).abs() <= 2.0 * f64::EPSILON * next.abs()
            || thi - tlo <= 2.0 * f64::EPSILON * tlo.abs().max(thi.abs());
        tau = next;
        if converged {
            break;
        }
    }
    Ok(finish(prob, origin, tau, iterations))
}

fn finish(prob: &Dpr1Problem, origin: f64, tau: f64, iterations: usize) -> SecularRoot {
    let mut v: Vec<f64> = prob.d.iter().zip(&prob.mu).map(|(&d, &m)| m / ((d - origin) - tau)).collect();
    let len = norm(&v);
    v.iter_mut().for_each(|x| *x /= len);
    SecularRoot { lambda: origin + tau, vector: v, iterations }
}

fn shifted_secular(prob: &Dpr1Problem, origin: f64, tau: f64) -> f64 {
    let mut sum = CompensatedSum::new(1.0);
    for (&d, &m) in prob.d.iter().zip(&prob.mu) {
        sum.add(prob.rho * m * m / ((d - origin) - tau));
    }
    sum.value()
}

fn shifted_secular_with_derivative(prob: &Dpr1Problem, origin: f64, tau: f64) -> (f64, f64) {
    let mut f = CompensatedSum::new(1.0);
    let mut df = 0.0;
    for (&d, &m) in prob.d.iter().zip(&prob.mu) {
        let r = m / ((d - origin) - tau);
        f.add(prob.rho * m * r);
        df += prob.rho * r * r;
    }
    (f.value(), df)
}

/// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn new(start: f64) -> Self {
        CompensatedSum { sum: start, carry: 0.0 }
    }

    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two_by_two() -> Dpr1Problem {
        Dpr1Problem::new(vec![2.0, 1.0], 1.0, vec![FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap()
    }

    #[test]
    fn single_pole_closed_form() {
        let prob = Dpr1Problem::new(vec![2.0], 1.0, vec![1.0]).unwrap();
        assert_eq!(secular(3.0, &prob).unwrap(), 0.0);
    }

    #[test]
    fn secular_vanishes_at_known_root() {
        let prob = two_by_two();
        let root = 2.0 + FRAC_1_SQRT_2;
        assert!(secular(root, &prob).unwrap().abs() < 1e-12);
    }

    #[test]
    fn secular_tends_to_one_from_below() {
        let prob = two_by_two();
        let w = secular(prob.upper_bound() + 1.0, &prob).unwrap();
        assert!(w > 0.0 && w < 1.0, "w = {w}");
    }

    #[test]
    fn secular_rejects_poles() {
        let prob = two_by_two();
        assert!(matches!(secular(1.0, &prob), Err(Error::PoleEvaluation { index: 1, .. })));
    }

    #[test]
    fn rejects_nonpositive_rho() {
        assert!(matches!(
            Dpr1Problem::new(vec![1.0], 0.0, vec![1.0]),
            Err(Error::InvalidProblem(_))
        ));
        let bad = Dpr1Problem { d: vec![1.0, 0.0], rho: -1.0, mu: vec![1.0, 1.0] };
        assert!(matches!(solve(&bad), Err(Error::InvalidProblem(_))));
    }

    #[test]
    fn zero_mu_deflates_everything() {
        let prob = Dpr1Problem::new(vec![1.0, 3.0, 2.0], 2.0, vec![0.0; 3]).unwrap();
        let s = solve(&prob).unwrap();
        assert_eq!(s.values, vec![3.0, 2.0, 1.0]);
        let perm = Matrix::from_rows(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert_eq!(s.vectors, perm);
        assert_eq!(s.deflated, vec![0, 1, 2]);
    }

    #[test]
    fn two_by_two_roots_and_separation() {
        let prob = two_by_two();
        let s = solve(&prob).unwrap();
        assert!((s.values[0] - (2.0 + FRAC_1_SQRT_2)).abs() < 1e-14);
        assert!((s.values[1] - (2.0 - FRAC_1_SQRT_2)).abs() < 1e-14);
        assert!(s.deflated.is_empty());
        assert!(strictly_separated(&prob, &s.values));
    }

    #[test]
    fn zero_component_deflates_exact_pair() {
        let prob = Dpr1Problem::new(vec![3.0, 2.0, 1.0], 1.0, vec![FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap();
        let (reduced, record) = deflate(&prob, DEFLATION_TOL);
        assert_eq!(reduced.d, vec![3.0, 1.0]);
        assert_eq!(record.pairs, vec![DeflatedPair { index: 1, value: 2.0, vector: vec![0.0, 1.0, 0.0] }]);
        let s = solve(&prob).unwrap();
        assert_eq!(s.deflated, vec![1]);
        assert!(s.values.contains(&2.0));
    }

    #[test]
    fn repeated_diagonal_merges() {
        let (a, b) = (0.6, -0.3);
        let prob = Dpr1Problem::new(vec![1.0, 1.0], 1.0, vec![a, b]).unwrap();
        let (reduced, record) = deflate(&prob, DEFLATION_TOL);
        assert_eq!(reduced.dim(), 1);
        assert_eq!(record.pairs.len(), 1);
        assert_eq!(record.pairs[0].value, 1.0);
        let s = solve(&prob).unwrap();
        assert!((s.values[0] - (1.0 + a * a + b * b)).abs() < 1e-15);
        assert_eq!(s.values[1], 1.0);
        assert!(s.vectors.orthonormality_error() < 1e-15);
    }

    #[test]
    fn nondegenerate_problem_is_untouched() {
        let prob = Dpr1Problem::new(vec![5.0, 2.0, -1.0], 0.5, vec![0.3, -0.4, 1.2]).unwrap();
        let (reduced, record) = deflate(&prob, DEFLATION_TOL);
        assert_eq!(reduced, prob);
        assert!(record.is_empty());
    }
}
