//! End-to-end runs: load or generate data, embed it both ways, diagnose, align, write files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::alignment::{procrustes_with, AlignmentResult, AlignmentSummary};
use crate::diagnostics::{diagnose, DiagnosticsConfig, DiagnosticsReport, DEFAULT_DIRECTIONS, PARALLEL_TOL};
use crate::error::Result;
use crate::ingest::{ingest_csv, write_coordinates};
use crate::linalg::principal_cosines;
use crate::matrix::{DataMatrix, Matrix};
use crate::pca::{scheme1_with, scheme2_with, Embedding, PcaOptions, Scheme};
use crate::synthetic::{generate, SyntheticSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT_ERROR: i32 = 1;
pub const EXIT_IMPLICATION_FAILURE: i32 = 2;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum InputSource {
    Csv { path: PathBuf, has_header: bool, label_column: Option<usize> },
    Synthetic(SyntheticSpec),
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub input: InputSource,
    pub k: usize,
    pub epsilon: f64,
    pub tol_parallel: f64,
    pub seed: u64,
    pub directions: usize,
    pub project_centered: bool,
    pub allow_scaling: bool,
}

impl RunConfig {
    pub fn new(input: InputSource, k: usize) -> Self {
        RunConfig {
            input,
            k,
            epsilon: 0.1,
            tol_parallel: PARALLEL_TOL,
            seed: 0,
            directions: DEFAULT_DIRECTIONS,
            project_centered: false,
            allow_scaling: false,
        }
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        DiagnosticsConfig {
            epsilon: self.epsilon,
            tol_parallel: self.tol_parallel,
            directions: self.directions,
            seed: self.seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SchemeSummary {
    pub scheme: Scheme,
    pub spectrum: Vec<f64>,
    pub projection: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingSummary {
    pub k: usize,
    pub project_centered: bool,
    pub scheme1: SchemeSummary,
    pub scheme2_uncentered: SchemeSummary,
    /// Cosines of the principal angles between the two projection subspaces.
    pub subspace_cosines: Vec<f64>,
    pub alignment: AlignmentSummary,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub diagnostics: DiagnosticsReport,
    pub embedding: EmbeddingSummary,
    pub implications_hold: bool,
    pub exit_code: i32,
}

/// Everything a run produces, including the coordinate matrices behind the report.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub data: DataMatrix,
    pub labels: Option<Vec<String>>,
    pub scheme1: Embedding,
    pub scheme2: Embedding,
    pub alignment: AlignmentResult,
}

pub fn load(input: &InputSource) -> Result<(DataMatrix, Option<Vec<String>>)> {
    match input {
        InputSource::Csv { path, has_header, label_column } => {
            let ds = ingest_csv(path, *has_header, *label_column)?;
            Ok((ds.data, ds.labels))
        }
        InputSource::Synthetic(spec) => Ok((generate(spec)?, None)),
    }
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    let (data, labels) = load(&config.input)?;
    run_on(config, data, labels)
}

/// Like [`run`] with the data already in memory; `config.input` is only echoed.
pub fn run_on(config: &RunConfig, data: DataMatrix, labels: Option<Vec<String>>) -> Result<RunOutput> {
    let opts = PcaOptions { project_centered: config.project_centered };
    let scheme1 = scheme1_with(&data, config.k, opts)?;
    let scheme2 = scheme2_with(&data, config.k, false, opts)?;
    let diagnostics = diagnose(&data, &config.diagnostics())?;
    let alignment = procrustes_with(&scheme1.coords, &scheme2.coords, config.allow_scaling)?;
    let embedding = EmbeddingSummary {
        k: config.k,
        project_centered: config.project_centered,
        scheme1: scheme_summary(&scheme1),
        scheme2_uncentered: scheme_summary(&scheme2),
        subspace_cosines: principal_cosines(&scheme1.model.projection, &scheme2.model.projection)?,
        alignment: alignment.summary(config.allow_scaling),
    };
    let implications_hold = diagnostics.implications_hold;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        diagnostics,
        embedding,
        implications_hold,
        exit_code: if implications_hold { EXIT_OK } else { EXIT_IMPLICATION_FAILURE },
    };
    Ok(RunOutput { report, data, labels, scheme1, scheme2, alignment })
}

fn scheme_summary(e: &Embedding) -> SchemeSummary {
    let proj = &e.model.projection;
    SchemeSummary {
        scheme: e.model.scheme,
        spectrum: e.model.spectrum.clone(),
        projection: (0..proj.ncols()).map(|j| proj.col(j)).collect(),
    }
}

pub fn to_json(report: &Report) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

/// Writes `report.json` and the three coordinate files into `dir`.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut json = to_json(&out.report)?;
    json.push('\n');
    fs::write(dir.join("report.json"), json)?;

    let k = out.report.embedding.k;
    let labels = out.labels.as_deref();
    let axes = |prefix: &str| (1..=k).map(|j| format!("{prefix}{j}")).collect::<Vec<_>>();
    write_coordinates(&dir.join("scheme1_embedding.csv"), &axes("pc"), &out.scheme1.coords, labels)?;
    write_coordinates(
        &dir.join("scheme2_uncentered_embedding.csv"),
        &axes("pc"),
        &out.scheme2.coords,
        labels,
    )?;

    let a = &out.alignment;
    let n = a.reference.nrows();
    let mut joined = Matrix::zeros(n, 2 * k + 1);
    for i in 0..n {
        for j in 0..k {
            joined[(i, j)] = a.reference[(i, j)];
            joined[(i, k + j)] = a.aligned[(i, j)];
        }
        joined[(i, 2 * k)] = a.per_point[i];
    }
    let mut header = axes("reference");
    header.extend(axes("aligned"));
    header.push("displacement".into());
    write_coordinates(&dir.join("aligned_discrepancy.csv"), &header, &joined, labels)?;
    Ok(())
}

/// Human-readable summary of a report.
pub fn render_text(r: &Report) -> String {
    let d = &r.diagnostics;
    let s = &d.dataset_summary;
    let mut t = String::new();
    let _ = writeln!(t, "data: n={} p={} ‖x̄‖={:.6e}", s.n, s.p, s.mean_norm);
    let _ = writeln!(t, "mean: {}", fmt_vec(&s.mean));
    let _ = writeln!(t, "singular values (centered): {}", fmt_vec(&s.centered_singular_values));
    let _ = writeln!(t, "singular values (raw):      {}", fmt_vec(&s.singular_values));
    let _ = writeln!(
        t,
        "parallel: cos={:.12} parallel={} (tol {:.1e})",
        d.parallel.cosine, d.parallel.is_parallel, d.parallel.tolerance
    );
    let _ = writeln!(
        t,
        "reconstruction: certified={} identity gap={:.3e} implication={}",
        d.reconstruction.certified, d.reconstruction.identity_relative_gap, d.reconstruction.implication_holds
    );
    let _ = writeln!(
        t,
        "mean threshold (eps={}): {:.6e} vs ‖x̄‖²={:.6e} hypothesis={} cos(v1,z0)={:.6} implication={}",
        d.bound.epsilon,
        d.bound.threshold,
        d.bound.mean_norm_sq,
        d.bound.hypothesis_holds,
        d.bound.conclusion_cosine,
        d.bound.implication_holds
    );
    let _ = writeln!(
        t,
        "dominance: {} directions, {} conclusion violations, {} bound violations, min margin {:.3e}",
        d.dominance.directions,
        d.dominance.conclusion_violations,
        d.dominance.bound_violations,
        d.dominance.min_bound_margin
    );
    let _ = writeln!(
        t,
        "interlacing: strict={} non_strict={} min margin={:.3e} secular deviation={:.3e}",
        d.interlacing.strict, d.interlacing.non_strict, d.interlacing.min_margin, d.interlacing.secular_max_deviation
    );
    for c in &d.partial_sums {
        let _ = writeln!(
            t,
            "partial sum k={}: D={:.6e} in [{:.6e}, {:.6e}] sandwich={} implication={}",
            c.k, c.discrepancy, c.lower_bound, c.upper_bound, c.sandwich_holds, c.implication_holds
        );
    }
    if let Some(c) = &d.rank_case {
        let _ = writeln!(
            t,
            "low rank r={}: D={:.6e} bound={:.6e} holds={} implication={}",
            c.rank, c.discrepancy, c.bound, c.holds, c.implication_holds
        );
    }
    let e = &r.embedding;
    let _ = writeln!(t, "embedding k={} subspace cosines: {}", e.k, fmt_vec(&e.subspace_cosines));
    let _ = writeln!(
        t,
        "alignment: rmsd={:.6e} max displacement={:.6e} axis correlations: {}",
        e.alignment.rmsd,
        e.alignment.max_displacement,
        fmt_vec(&e.alignment.axis_correlations)
    );
    let _ = writeln!(t, "implications hold: {}", r.implications_hold);
    t
}

fn fmt_vec(v: &[f64]) -> String {
    let parts = v.iter().map(|x| format!("{x:.6e}")).collect::<Vec<_>>();
    format!("[{}]", parts.join(", "))
}
