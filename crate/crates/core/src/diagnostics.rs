//! Checks relating the SVD of a data matrix `X` to the SVD of its centered
//! copy `X̄ = X - 1ₙ x̄ᵀ`.
//!
//! Every check reports signed margins next to its verdict so near-failures
//! stay visible. Notation in the docs: `σ_i` are singular values of `X`,
//! `σ̄_i` those of `X̄`, `v̄_i` the centered right singular vectors,
//! `z₀ = x̄ / ‖x̄‖` the mean direction and `ρ = n ‖x̄‖²`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::dpr1::{self, Dpr1Problem};
use crate::error::{Error, Result};
use crate::linalg::{complete_orthonormal, svd, SvdResult};
use crate::matrix::{dot, norm, DataMatrix, Matrix};
use crate::pca::{center, column_mean};

pub const PARALLEL_TOL: f64 = 1e-8;
pub const DEFAULT_DIRECTIONS: usize = 256;
/// Chain margins above `STRICT_TOL * σ₁²` count as strict, above `-STRICT_TOL * σ₁²` as non-strict.
pub const STRICT_TOL: f64 = 1e-10;
/// A mean whose norm is below this fraction of the RMS row norm is treated as zero.
pub const ZERO_MEAN_TOL: f64 = 1e-12;
/// Relative slack for inequalities that hold exactly in real arithmetic.
const ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct ParallelCheck {
    /// `|⟨v̄₁, z₀⟩|`.
    pub cosine: f64,
    pub is_parallel: bool,
    pub tolerance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionCheck {
    pub certified: bool,
    /// `σ₁² - (σ̄₁² + n‖x̄‖²)` from the direct SVD of `X`.
    pub identity_gap: f64,
    pub identity_relative_gap: f64,
    /// Largest allowed `|identity_relative_gap|` given the measured parallel cosine.
    pub identity_bound: f64,
    pub max_singular_value_relative_error: Option<f64>,
    pub max_right_vector_error: Option<f64>,
    pub u_star_norm_error: Option<f64>,
    pub reconstruction_relative_error: Option<f64>,
    pub implication_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundCheck {
    pub epsilon: f64,
    pub threshold: f64,
    pub mean_norm_sq: f64,
    pub hypothesis_holds: bool,
    pub hypothesis_margin: f64,
    /// `|v₁ᵀ z₀|`.
    pub conclusion_cosine: f64,
    pub conclusion_margin: f64,
    pub conclusion_holds: bool,
    pub implication_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceCheck {
    /// `⟨z₀, z⟩²`.
    pub cos_sq: f64,
    /// Smallest `‖x̄‖²` for which the direction `z` is guaranteed not to beat `z₀`.
    pub threshold: f64,
    pub mean_norm_sq: f64,
    pub hypothesis_holds: bool,
    /// `‖X z₀‖²`.
    pub mean_energy: f64,
    /// `‖X z‖²`.
    pub direction_energy: f64,
    /// `n‖x̄‖² (1 - ⟨z₀,z⟩²) + σ̄_p² - σ̄₁²`, a lower bound on `mean_energy - direction_energy`.
    pub lower_bound: f64,
    pub bound_margin: f64,
    pub conclusion_holds: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DominanceSummary {
    pub directions: usize,
    pub seed: u64,
    pub hypothesis_count: usize,
    pub conclusion_violations: usize,
    pub bound_violations: usize,
    pub min_bound_margin: f64,
    /// Relative error of `‖Xz₀‖² = Σ σ̄_i² (z₀ᵀv̄_i)² + n‖x̄‖²`.
    pub energy_identity_relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterlacingCheck {
    pub centered_sq: Vec<f64>,
    pub raw_sq: Vec<f64>,
    pub rho: f64,
    /// `σ̄₁² + n‖x̄‖²`.
    pub upper: f64,
    /// Chain margins from the bottom: `σ_p² - σ̄_p²`, `σ̄_{p-1}² - σ_p²`, ..., `σ̄₁² + ρ - σ₁²`.
    pub margins: Vec<f64>,
    pub min_margin: f64,
    pub tolerance: f64,
    pub strict: bool,
    pub non_strict: bool,
    /// Components of `z₀` in the centered right singular basis.
    pub mean_coordinates: Vec<f64>,
    /// `σ²` predicted by the secular equation of `Σ̄² + ρ z zᵀ`.
    pub secular_values: Vec<f64>,
    pub secular_max_deviation: f64,
    pub secular_deflated: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartialSumCheck {
    pub k: usize,
    pub epsilon: f64,
    /// `D_k = ‖X‖²_{2,k+1} - (‖X̄‖²_{2,k} + n‖x̄‖²)`.
    pub discrepancy: f64,
    /// `-σ̄₁² + σ̄²_{k+1}`.
    pub lower_bound: f64,
    /// `σ̄₁²`.
    pub upper_bound: f64,
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub sandwich_holds: bool,
    pub hypothesis_holds: bool,
    pub implication_holds: bool,
    /// `‖X‖²_{2,k} - (‖X̄‖²_{2,k} + n‖x̄‖²)`; zero when `v̄₁` is parallel to `x̄`.
    pub aligned_discrepancy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LowRankCheck {
    pub rank: usize,
    pub discrepancy: f64,
    pub bound: f64,
    pub margin: f64,
    pub holds: bool,
    pub hypothesis_holds: bool,
    pub implication_holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetSummary {
    pub n: usize,
    pub p: usize,
    pub mean: Vec<f64>,
    pub mean_norm: f64,
    pub centered_singular_values: Vec<f64>,
    pub singular_values: Vec<f64>,
    pub centered_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagnosticsReport {
    pub dataset_summary: DatasetSummary,
    pub parallel: ParallelCheck,
    pub reconstruction: ReconstructionCheck,
    pub bound: BoundCheck,
    pub dominance: DominanceSummary,
    pub interlacing: InterlacingCheck,
    pub partial_sums: Vec<PartialSumCheck>,
    pub rank_case: Option<LowRankCheck>,
    pub implications_hold: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct DiagnosticsConfig {
    pub epsilon: f64,
    pub tol_parallel: f64,
    pub directions: usize,
    pub seed: u64,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            epsilon: 0.1,
            tol_parallel: PARALLEL_TOL,
            directions: DEFAULT_DIRECTIONS,
            seed: 0,
        }
    }
}

/// Shared decompositions of a dataset with a nonzero mean.
#[derive(Clone, Debug)]
pub struct Spectra {
    pub n: usize,
    pub p: usize,
    pub mean: Vec<f64>,
    pub mean_norm: f64,
    /// `z₀`.
    pub mean_direction: Vec<f64>,
    pub raw: SvdResult,
    pub centered: SvdResult,
}

impl Spectra {
    pub fn new(x: &DataMatrix) -> Result<Self> {
        x.require_tall()?;
        let mean = column_mean(x);
        let mean_norm = norm(&mean);
        let rms_row = x.matrix().frobenius_norm() / (x.n() as f64).sqrt();
        if mean_norm <= ZERO_MEAN_TOL * rms_row {
            return Err(Error::ZeroMeanInput);
        }
        let mean_direction = mean.iter().map(|m| m / mean_norm).collect();
        Ok(Spectra {
            n: x.n(),
            p: x.p(),
            mean,
            mean_norm,
            mean_direction,
            raw: svd(x)?,
            centered: svd(&center(x))?,
        })
    }

    /// `n ‖x̄‖²`.
    pub fn rho(&self) -> f64 {
        self.n as f64 * self.mean_norm * self.mean_norm
    }

    pub fn mean_norm_sq(&self) -> f64 {
        self.mean_norm * self.mean_norm
    }

    fn centered_extremes_sq(&self) -> (f64, f64) {
        let s = &self.centered.sigma;
        (s[0] * s[0], s[s.len() - 1] * s[s.len() - 1])
    }
}

pub fn parallel_check(x: &DataMatrix, tol: f64) -> Result<ParallelCheck> {
    Ok(parallel_from(&Spectra::new(x)?, tol))
}

fn parallel_from(sp: &Spectra, tol: f64) -> ParallelCheck {
    // With X̄ = 0 every unit vector is a centered singular vector, z₀ included.
    let cosine = if sp.centered.sigma[0] == 0.0 {
        1.0
    } else {
        dot(&sp.centered.right_vector(0), &sp.mean_direction).abs()
    };
    ParallelCheck { cosine, is_parallel: cosine >= 1.0 - tol, tolerance: tol }
}

/// SVD of `X = X̄ + 1ₙ x̄ᵀ` assembled from the SVD of `X̄` when `v̄₁ ∥ x̄`.
///
/// Only the first triplet changes: `σ₁ = √(σ̄₁² + n‖x̄‖²)` and
/// `u* = (σ̄₁ ū₁ ± ‖x̄‖ 1ₙ) / σ₁`, the sign matching `v̄₁` against `x̄`.
pub fn reconstruct_uncentered_svd(
    centered: &SvdResult,
    mean: &[f64],
    n: usize,
    certificate: &ParallelCheck,
) -> Result<SvdResult> {
    if !certificate.is_parallel {
        return Err(Error::PreconditionViolation(format!(
            "first centered singular vector is not parallel to the mean (cosine {} < 1 - {})",
            certificate.cosine, certificate.tolerance
        )));
    }
    let mean_norm = norm(mean);
    if mean_norm == 0.0 {
        return Err(Error::ZeroMeanInput);
    }
    let p = centered.sigma.len();
    let z0: Vec<f64> = mean.iter().map(|m| m / mean_norm).collect();
    let sigma_bar_1 = centered.sigma[0];

    let mut v = centered.v.clone();
    let mut u = centered.u.clone();
    if sigma_bar_1 == 0.0 {
        // X̄ = 0: any orthonormal basis works, so put z₀ first.
        let mut cols: Vec<Vec<f64>> = vec![vec![0.0; p]; p];
        cols[0] = z0.clone();
        complete_orthonormal(&mut cols, &(1..p).collect::<Vec<_>>());
        v = Matrix::from_columns(&cols)?;
    }
    let sign = if dot(&v.col(0), &z0) >= 0.0 { 1.0 } else { -1.0 };
    let sigma_1 = (sigma_bar_1 * sigma_bar_1 + n as f64 * mean_norm * mean_norm).sqrt();
    let u_star: Vec<f64> =
        u.col(0).iter().map(|&ub| (sigma_bar_1 * ub + sign * mean_norm) / sigma_1).collect();
    if sigma_bar_1 == 0.0 {
        let mut cols: Vec<Vec<f64>> = vec![vec![0.0; n]; p];
        cols[0] = u_star;
        complete_orthonormal(&mut cols, &(1..p).collect::<Vec<_>>());
        u = Matrix::from_columns(&cols)?;
    } else {
        u.set_col(0, &u_star);
    }
    let mut sigma = centered.sigma.clone();
    sigma[0] = sigma_1;
    Ok(SvdResult { u, sigma, v })
}

/// `(σ̄²_max - σ̄²_min) / (n (1 - (1-ε)²))` from centered singular values.
pub fn mean_norm_threshold(centered_spectrum: &[f64], n: usize, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    if n == 0 || centered_spectrum.is_empty() {
        return Err(Error::InsufficientData { required: 1, got: n });
    }
    let sq = centered_spectrum.iter().map(|s| s * s);
    let max = sq.clone().fold(f64::NEG_INFINITY, f64::max);
    let min = sq.fold(f64::INFINITY, f64::min);
    let spread = 1.0 - (1.0 - epsilon) * (1.0 - epsilon);
    Ok((max - min) / (n as f64 * spread))
}

/// Compares the energy of the mean direction with that of a unit direction `z`.
pub fn check_mean_dominance(x: &DataMatrix, z: &[f64]) -> Result<DominanceCheck> {
    let sp = Spectra::new(x)?;
    dominance_from(x, &sp, z)
}

fn dominance_from(x: &DataMatrix, sp: &Spectra, z: &[f64]) -> Result<DominanceCheck> {
    if z.len() != sp.p {
        return Err(Error::ShapeViolation(format!("direction has {} entries, expected {}", z.len(), sp.p)));
    }
    if (norm(z) - 1.0).abs() > 1e-10 {
        return Err(Error::PreconditionViolation(format!("direction has norm {}", norm(z))));
    }
    let c = dot(&sp.mean_direction, z);
    let cos_sq = c * c;
    let off = 1.0 - cos_sq;
    if off <= ROUNDOFF {
        return Err(Error::DegenerateDirection(cos_sq));
    }
    let (top, bottom) = sp.centered_extremes_sq();
    let n = sp.n as f64;
    let mean_norm_sq = sp.mean_norm_sq();
    let threshold = (top - bottom) / (n * off);
    let mean_energy = sq_norm(&x.matrix().matvec(&sp.mean_direction)?);
    let direction_energy = sq_norm(&x.matrix().matvec(z)?);
    let lower_bound = n * mean_norm_sq * off + bottom - top;
    let gap = mean_energy - direction_energy;
    let hypothesis_holds = mean_norm_sq >= threshold;
    Ok(DominanceCheck {
        cos_sq,
        threshold,
        mean_norm_sq,
        hypothesis_holds,
        mean_energy,
        direction_energy,
        lower_bound,
        bound_margin: gap - lower_bound,
        conclusion_holds: hypothesis_holds.then_some(gap >= -ROUNDOFF * mean_energy),
    })
}

/// Evaluates the `ε`-cap membership of the first right singular vector of `X`.
pub fn epsilon_membership(x: &DataMatrix, epsilon: f64) -> Result<BoundCheck> {
    bound_from(&Spectra::new(x)?, epsilon)
}

fn bound_from(sp: &Spectra, epsilon: f64) -> Result<BoundCheck> {
    let threshold = mean_norm_threshold(&sp.centered.sigma, sp.n, epsilon)?;
    let mean_norm_sq = sp.mean_norm_sq();
    let hypothesis_holds = mean_norm_sq >= threshold;
    let conclusion_cosine = dot(&sp.raw.right_vector(0), &sp.mean_direction).abs();
    let conclusion_holds = conclusion_cosine >= 1.0 - epsilon;
    Ok(BoundCheck {
        epsilon,
        threshold,
        mean_norm_sq,
        hypothesis_holds,
        hypothesis_margin: mean_norm_sq - threshold,
        conclusion_cosine,
        conclusion_margin: conclusion_cosine - (1.0 - epsilon),
        conclusion_holds,
        implication_holds: !hypothesis_holds || conclusion_holds,
    })
}

/// Compares the squared singular values of `X` and `X̄` along the chain
/// `σ̄_p² ≤ σ_p² ≤ σ̄_{p-1}² ≤ ... ≤ σ̄₁² ≤ σ₁² ≤ σ̄₁² + n‖x̄‖²`, and re-derives
/// `σ²` from the secular equation of `Σ̄² + n‖x̄‖² z zᵀ` with `z = V̄ᵀ z₀`.
pub fn interlacing_check(x: &DataMatrix) -> Result<InterlacingCheck> {
    interlacing_from(&Spectra::new(x)?)
}

fn interlacing_from(sp: &Spectra) -> Result<InterlacingCheck> {
    let centered_sq = sp.centered.squared();
    let raw_sq = sp.raw.squared();
    let rho = sp.rho();
    let upper = centered_sq[0] + rho;
    let p = sp.p;

    let mut margins = Vec::with_capacity(2 * p);
    for j in (0..p).rev() {
        margins.push(raw_sq[j] - centered_sq[j]);
        if j > 0 {
            margins.push(centered_sq[j - 1] - raw_sq[j]);
        }
    }
    margins.push(upper - raw_sq[0]);
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let tolerance = STRICT_TOL * raw_sq[0];

    let mean_coordinates = sp.centered.v.transpose().matvec(&sp.mean_direction)?;
    let problem = Dpr1Problem::new(centered_sq.clone(), rho, mean_coordinates.clone())?;
    let secular = dpr1::solve(&problem)?;
    let secular_max_deviation = secular
        .values
        .iter()
        .zip(&raw_sq)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
        / raw_sq[0];

    Ok(InterlacingCheck {
        strict: margins.iter().all(|&m| m > tolerance),
        non_strict: margins.iter().all(|&m| m >= -tolerance),
        centered_sq,
        raw_sq,
        rho,
        upper,
        margins,
        min_margin,
        tolerance,
        mean_coordinates,
        secular_deflated: secular.deflated.len(),
        secular_values: secular.values,
        secular_max_deviation,
    })
}

/// Partial-sum discrepancy `D_k` against its sandwich bounds, for `1 <= k <= p-1`.
pub fn partial_sum_check(x: &DataMatrix, k: usize, epsilon: f64) -> Result<PartialSumCheck> {
    partial_sum_from(&Spectra::new(x)?, k, epsilon)
}

fn partial_sum_from(sp: &Spectra, k: usize, epsilon: f64) -> Result<PartialSumCheck> {
    let p = sp.p;
    if p < 2 || k == 0 || k >= p {
        return Err(Error::IndexViolation { index: k, lo: 1, hi: p.saturating_sub(1) });
    }
    let threshold = mean_norm_threshold(&sp.centered.sigma, sp.n, epsilon)?;
    let rho = sp.rho();
    let centered_k = sp.centered.partial_sum(k)?;
    let discrepancy = sp.raw.partial_sum(k + 1)? - (centered_k + rho);
    let aligned_discrepancy = sp.raw.partial_sum(k)? - (centered_k + rho);
    let top = sp.centered.sigma[0].powi(2);
    let lower_bound = -top + sp.centered.sigma[k].powi(2);
    let lower_margin = discrepancy - lower_bound;
    let upper_margin = top - discrepancy;
    let sandwich_holds = lower_margin > 0.0 && upper_margin > 0.0;
    let hypothesis_holds = sp.mean_norm_sq() >= threshold;
    Ok(PartialSumCheck {
        k,
        epsilon,
        discrepancy,
        lower_bound,
        upper_bound: top,
        lower_margin,
        upper_margin,
        sandwich_holds,
        hypothesis_holds,
        implication_holds: !hypothesis_holds || sandwich_holds,
        aligned_discrepancy,
    })
}

fn low_rank_from(sp: &Spectra, epsilon: f64) -> Result<Option<LowRankCheck>> {
    let rank = sp.centered.rank();
    if rank == 0 || rank >= sp.p {
        return Ok(None);
    }
    let check = partial_sum_from(sp, rank, epsilon)?;
    let margin = check.upper_bound - check.discrepancy.abs();
    let holds = margin > 0.0;
    Ok(Some(LowRankCheck {
        rank,
        discrepancy: check.discrepancy,
        bound: check.upper_bound,
        margin,
        holds,
        hypothesis_holds: check.hypothesis_holds,
        implication_holds: !check.hypothesis_holds || holds,
    }))
}

fn reconstruction_from(x: &DataMatrix, sp: &Spectra, parallel: &ParallelCheck) -> Result<ReconstructionCheck> {
    let sigma_1_sq = sp.raw.sigma[0].powi(2);
    let identity_gap = sigma_1_sq - (sp.centered.sigma[0].powi(2) + sp.rho());
    let identity_relative_gap = identity_gap / sigma_1_sq;
    // z₀ = c v̄₁ + s w with c = cosine: σ̄₁² + ρ - σ₁² <= (1 - c²) σ̄₁², and σ₁² never exceeds σ̄₁² + ρ.
    let identity_bound = (1.0 - parallel.cosine * parallel.cosine).max(0.0) + ROUNDOFF;
    let mut check = ReconstructionCheck {
        certified: parallel.is_parallel,
        identity_gap,
        identity_relative_gap,
        identity_bound,
        max_singular_value_relative_error: None,
        max_right_vector_error: None,
        u_star_norm_error: None,
        reconstruction_relative_error: None,
        implication_holds: true,
    };
    if !parallel.is_parallel {
        return Ok(check);
    }
    let rebuilt = reconstruct_uncentered_svd(&sp.centered, &sp.mean, sp.n, parallel)?;
    check.max_singular_value_relative_error = Some(
        rebuilt
            .sigma
            .iter()
            .zip(&sp.raw.sigma)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / sp.raw.sigma[0],
    );
    check.max_right_vector_error = Some(
        (0..sp.p)
            .map(|j| {
                let c = dot(&rebuilt.right_vector(j), &sp.raw.right_vector(j)).abs();
                (1.0 - c.min(1.0)).max(0.0)
            })
            .fold(0.0, f64::max),
    );
    check.u_star_norm_error = Some((norm(&rebuilt.left_vector(0)) - 1.0).abs());
    let residual = rebuilt.reconstruct().sub(x.matrix())?.frobenius_norm();
    check.reconstruction_relative_error = Some(residual / x.matrix().frobenius_norm());
    check.implication_holds = identity_relative_gap.abs() <= identity_bound;
    Ok(check)
}

fn dominance_summary(x: &DataMatrix, sp: &Spectra, directions: usize, seed: u64) -> Result<DominanceSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summary = DominanceSummary {
        directions: 0,
        seed,
        hypothesis_count: 0,
        conclusion_violations: 0,
        bound_violations: 0,
        min_bound_margin: f64::INFINITY,
        energy_identity_relative_error: 0.0,
    };
    while summary.directions < directions {
        let mut z: Vec<f64> = (0..sp.p).map(|_| StandardNormal.sample(&mut rng)).collect();
        let len = norm(&z);
        if len == 0.0 {
            continue;
        }
        z.iter_mut().for_each(|v| *v /= len);
        let check = match dominance_from(x, sp, &z) {
            Ok(c) => c,
            Err(Error::DegenerateDirection(_)) => continue,
            Err(e) => return Err(e),
        };
        summary.directions += 1;
        if check.hypothesis_holds {
            summary.hypothesis_count += 1;
        }
        if check.conclusion_holds == Some(false) {
            summary.conclusion_violations += 1;
        }
        if check.bound_margin < -ROUNDOFF * check.mean_energy.max(1.0) {
            summary.bound_violations += 1;
        }
        summary.min_bound_margin = summary.min_bound_margin.min(check.bound_margin);
    }

    let mean_energy = sq_norm(&x.matrix().matvec(&sp.mean_direction)?);
    let expansion: f64 = (0..sp.p)
        .map(|i| sp.centered.sigma[i].powi(2) * dot(&sp.mean_direction, &sp.centered.right_vector(i)).powi(2))
        .sum::<f64>()
        + sp.rho();
    summary.energy_identity_relative_error = (mean_energy - expansion).abs() / mean_energy;
    Ok(summary)
}

/// Runs every check on one dataset.
pub fn diagnose(x: &DataMatrix, config: &DiagnosticsConfig) -> Result<DiagnosticsReport> {
    let sp = Spectra::new(x)?;
    let parallel = parallel_from(&sp, config.tol_parallel);
    let reconstruction = reconstruction_from(x, &sp, &parallel)?;
    let bound = bound_from(&sp, config.epsilon)?;
    let dominance = dominance_summary(x, &sp, config.directions, config.seed)?;
    let interlacing = interlacing_from(&sp)?;
    let partial_sums = (1..sp.p)
        .map(|k| partial_sum_from(&sp, k, config.epsilon))
        .collect::<Result<Vec<_>>>()?;
    let rank_case = low_rank_from(&sp, config.epsilon)?;

    let implications_hold = reconstruction.implication_holds
        && bound.implication_holds
        && dominance.conclusion_violations == 0
        && dominance.bound_violations == 0
        && interlacing.non_strict
        && partial_sums.iter().all(|c| c.implication_holds)
        && rank_case.as_ref().is_none_or(|c| c.implication_holds);

    let dataset_summary = DatasetSummary {
        n: sp.n,
        p: sp.p,
        mean: sp.mean.clone(),
        mean_norm: sp.mean_norm,
        centered_singular_values: sp.centered.sigma.clone(),
        singular_values: sp.raw.sigma.clone(),
        centered_rank: sp.centered.rank(),
    };
    Ok(DiagnosticsReport {
        dataset_summary,
        parallel,
        reconstruction,
        bound,
        dominance,
        interlacing,
        partial_sums,
        rank_case,
        implications_hold,
    })
}

fn sq_norm(v: &[f64]) -> f64 {
    dot(v, v)
}
