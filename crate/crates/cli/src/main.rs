use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use centerlab::alignment::procrustes_with;
use centerlab::dpr1::{self, Dpr1Problem};
use centerlab::ingest::{ingest_csv, write_coordinates, write_coordinates_to};
use centerlab::pca::{scheme1_with, scheme2_with, PcaOptions};
use centerlab::report::{self, InputSource, RunConfig, EXIT_INPUT_ERROR};
use centerlab::synthetic::{generate, SyntheticKind, SyntheticSpec};
use centerlab::{Error, Result};

#[derive(Parser)]
#[command(name = "centerlab", version, about = "PCA with and without mean centering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed data with one PCA route and write the coordinates as CSV.
    Pca(PcaArgs),
    /// Run every diagnostic, compare both embeddings and write a report.
    Diagnose(DiagnoseArgs),
    /// Procrustes-align a target embedding onto a reference embedding.
    Align(AlignArgs),
    /// Write a synthetic dataset as CSV.
    Generate(GenerateArgs),
    /// Solve a diagonal-plus-rank-one eigenproblem given as JSON `{"d": [...], "rho": r, "mu": [...]}`.
    Dpr1(Dpr1Args),
}

#[derive(Args)]
struct InputArgs {
    /// Numeric CSV file.
    #[arg(long, conflicts_with = "generate", required_unless_present = "generate")]
    input: Option<PathBuf>,
    /// The CSV has no header row.
    #[arg(long)]
    no_header: bool,
    /// Zero-based column holding labels instead of numbers.
    #[arg(long)]
    label_column: Option<usize>,
    /// Generate data of this kind instead of reading a file.
    #[arg(long, value_parser = parse_kind)]
    generate: Option<SyntheticKind>,
    #[command(flatten)]
    synth: SynthArgs,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 6)]
    p: usize,
    /// Rank of the centered part for low_rank data.
    #[arg(long)]
    k_rank: Option<usize>,
    #[arg(long)]
    mean_scale: Option<f64>,
    #[arg(long)]
    noise_scale: Option<f64>,
    /// Seed for data generation.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Covariance,
    SvdCentered,
    SvdUncentered,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct PcaArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "covariance")]
    scheme: SchemeArg,
    /// Project the centered data instead of the raw data.
    #[arg(long)]
    project_centered: bool,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = centerlab::diagnostics::PARALLEL_TOL)]
    tol_parallel: f64,
    /// Seed for the random directions of the dominance check.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = centerlab::diagnostics::DEFAULT_DIRECTIONS)]
    directions: usize,
    #[arg(long)]
    project_centered: bool,
    #[arg(long)]
    allow_scaling: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Directory for report.json and the coordinate files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct AlignArgs {
    /// Reference coordinates (CSV with header).
    #[arg(long)]
    reference: PathBuf,
    /// Coordinates to rotate onto the reference.
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long)]
    allow_scaling: bool,
    /// CSV of aligned coordinates; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(value_parser = parse_kind)]
    kind: SyntheticKind,
    #[command(flatten)]
    synth: SynthArgs,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Dpr1Args {
    #[arg(long)]
    problem: PathBuf,
}

fn parse_kind(s: &str) -> std::result::Result<SyntheticKind, String> {
    s.parse::<SyntheticKind>().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pca(a) => cmd_pca(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Align(a) => cmd_align(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Dpr1(a) => cmd_dpr1(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("centerlab: {} error: {e}", e.module());
            ExitCode::from(EXIT_INPUT_ERROR as u8)
        }
    }
}

fn synthetic_spec(kind: SyntheticKind, s: &SynthArgs, epsilon: f64) -> SyntheticSpec {
    let mut spec = SyntheticSpec::new(kind, s.n, s.p, s.data_seed);
    if let Some(r) = s.k_rank {
        spec.k_rank = r;
    }
    if let Some(m) = s.mean_scale {
        spec.mean_scale = m;
    }
    if let Some(v) = s.noise_scale {
        spec.noise_scale = v;
    }
    spec.epsilon = epsilon;
    spec
}

fn input_source(a: &InputArgs, epsilon: f64) -> InputSource {
    match (&a.input, a.generate) {
        (Some(path), _) => InputSource::Csv {
            path: path.clone(),
            has_header: !a.no_header,
            label_column: a.label_column,
        },
        (None, Some(kind)) => InputSource::Synthetic(synthetic_spec(kind, &a.synth, epsilon)),
        (None, None) => unreachable!("clap requires --input or --generate"),
    }
}

fn cmd_pca(a: PcaArgs) -> Result<i32> {
    let (x, labels) = report::load(&input_source(&a.input, 0.1))?;
    let opts = PcaOptions { project_centered: a.project_centered };
    let emb = match a.scheme {
        SchemeArg::Covariance => scheme1_with(&x, a.k, opts)?,
        SchemeArg::SvdCentered => scheme2_with(&x, a.k, true, opts)?,
        SchemeArg::SvdUncentered => scheme2_with(&x, a.k, false, opts)?,
    };
    let header: Vec<String> = (1..=a.k).map(|j| format!("pc{j}")).collect();
    write_matrix(a.out.as_deref(), &header, &emb.coords, labels.as_deref())?;
    Ok(0)
}

fn cmd_diagnose(a: DiagnoseArgs) -> Result<i32> {
    let mut config = RunConfig::new(input_source(&a.input, a.epsilon), a.k);
    config.epsilon = a.epsilon;
    config.tol_parallel = a.tol_parallel;
    config.seed = a.seed;
    config.directions = a.directions;
    config.project_centered = a.project_centered;
    config.allow_scaling = a.allow_scaling;
    let out = report::run(&config)?;
    if let Some(dir) = &a.out_dir {
        report::write_outputs(&out, dir)?;
    }
    match a.format {
        Format::Json => println!("{}", report::to_json(&out.report)?),
        Format::Text => print!("{}", report::render_text(&out.report)),
    }
    Ok(out.report.exit_code)
}

fn cmd_align(a: AlignArgs) -> Result<i32> {
    let reference = ingest_csv(&a.reference, true, a.label_column)?;
    let target = ingest_csv(&a.target, true, a.label_column)?;
    let result = procrustes_with(reference.data.matrix(), target.data.matrix(), a.allow_scaling)?;
    let summary = result.summary(a.allow_scaling);
    eprintln!("rmsd {:.6e}  max displacement {:.6e}", summary.rmsd, summary.max_displacement);
    let header = reference
        .header
        .unwrap_or_else(|| (1..=result.aligned.ncols()).map(|j| format!("pc{j}")).collect());
    write_matrix(a.out.as_deref(), &header, &result.aligned, reference.labels.as_deref())?;
    Ok(0)
}

fn cmd_generate(a: GenerateArgs) -> Result<i32> {
    let spec = synthetic_spec(a.kind, &a.synth, a.epsilon);
    let x = generate(&spec)?;
    let header: Vec<String> = (1..=x.p()).map(|j| format!("x{j}")).collect();
    write_matrix(a.out.as_deref(), &header, x.matrix(), None)?;
    Ok(0)
}

fn cmd_dpr1(a: Dpr1Args) -> Result<i32> {
    let problem: Dpr1Problem = serde_json::from_str(&fs::read_to_string(&a.problem)?)?;
    let spectrum = dpr1::solve(&problem)?;
    let vectors: Vec<Vec<f64>> = (0..spectrum.vectors.ncols()).map(|j| spectrum.vectors.col(j)).collect();
    let out = serde_json::json!({
        "values": spectrum.values,
        "vectors": vectors,
        "deflated": spectrum.deflated,
        "strictly_separated": dpr1::strictly_separated(&problem, &spectrum.values),
    });
    println!("{}", serde_json::to_string_pretty(&out).map_err(Error::from)?);
    Ok(0)
}

fn write_matrix(
    out: Option<&Path>,
    header: &[String],
    m: &centerlab::Matrix,
    labels: Option<&[String]>,
) -> Result<()> {
    match out {
        Some(path) => write_coordinates(path, header, m, labels),
        None => write_coordinates_to(&mut std::io::stdout().lock(), header, m, labels),
    }
}
