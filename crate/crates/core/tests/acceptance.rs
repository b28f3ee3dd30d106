//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

mod common;

use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use centerlab::alignment::{normalize_embedding, procrustes};
use centerlab::diagnostics::{
    diagnose, epsilon_membership, interlacing_check, parallel_check, partial_sum_check, reconstruct_uncentered_svd,
    DiagnosticsConfig, Spectra, PARALLEL_TOL,
};
use centerlab::dpr1::{solve, strictly_separated, Dpr1Problem};
use centerlab::ingest::ingest_csv;
use centerlab::linalg::{jacobi_eigh, svd};
use centerlab::matrix::DataMatrix;
use centerlab::pca::{center, column_mean, scheme1, scheme2};
use centerlab::report::{run, to_json, InputSource, RunConfig};
use centerlab::synthetic::{generate, SyntheticKind, SyntheticSpec};
use common::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn iris_path() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/iris.csv")
}

/// Scheme equivalence on centered data.
fn criterion_1() -> Outcome {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let mut resampled = 0;
    while used < 200 {
        let p = r.random_range(2..=8);
        let n = r.random_range(p + 1..=40);
        let x = center(&gaussian_data(n, p, &mut r));
        let sq = svd(&x).unwrap().squared();
        if !sq.windows(2).all(|w| w[0] - w[1] >= 1e-6 * sq[0]) {
            resampled += 1;
            continue;
        }
        used += 1;
        for k in 1..p {
            let a = canonical(&scheme1(&x, k).unwrap().coords);
            for do_center in [true, false] {
                let b = canonical(&scheme2(&x, k, do_center).unwrap().coords);
                worst = worst.max(a.sub(&b).unwrap().max_abs());
            }
        }
    }
    outcome(worst <= 1e-8, format!("200 matrices ({resampled} resampled for gaps), max deviation {worst:.2e} (limit 1e-8)"))
}

/// Reconstruction identity on parallel-mean synthetics.
fn criterion_2() -> Outcome {
    let mut r = rng(102);
    let (mut sv, mut ident, mut unit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for seed in 0..100 {
        let p = r.random_range(2..=8);
        let n = r.random_range(p + 2..=60);
        let x = generate(&SyntheticSpec::new(SyntheticKind::ParallelMean, n, p, seed)).unwrap();
        let sp = Spectra::new(&x).unwrap();
        let cert = parallel_check(&x, PARALLEL_TOL).unwrap();
        let rebuilt = reconstruct_uncentered_svd(&sp.centered, &sp.mean, n, &cert).unwrap();
        let direct = svd(&x).unwrap();
        for (a, b) in rebuilt.sigma.iter().zip(&direct.sigma) {
            sv = sv.max((a - b).abs() / b);
        }
        let rho = n as f64 * sp.mean_norm_sq();
        let gap = direct.sigma[0].powi(2) - sp.centered.sigma[0].powi(2);
        ident = ident.max((gap - rho).abs() / rho);
        let u = rebuilt.left_vector(0);
        unit = unit.max((u.iter().map(|v| v * v).sum::<f64>().sqrt() - 1.0).abs());
    }
    outcome(
        sv <= 1e-9 && ident <= 1e-9 && unit <= 1e-12,
        format!("100 synthetics, singular values {sv:.2e} rel, identity {ident:.2e} rel, |‖u*‖-1| {unit:.2e}"),
    )
}

/// DPR1 secular solver against the dense eigensolver.
fn criterion_3() -> Outcome {
    let mut r = rng(103);
    let mut worst: f64 = 0.0;
    let mut separated_failures = 0;
    let mut nondeflated = 0;
    for trial in 0..1000 {
        let p = r.random_range(2..=8);
        let mut d: Vec<f64> = (0..p).map(|_| r.random_range(-10.0..10.0)).collect();
        let mut mu: Vec<f64> = (0..p).map(|_| normal(&mut r)).collect();
        // every tenth problem carries a repeated diagonal entry or a zero weight
        if trial % 10 == 0 {
            let i = r.random_range(0..p);
            if trial % 20 == 0 {
                d[(i + 1) % p] = d[i];
            } else {
                mu[i] = 0.0;
            }
        }
        d.sort_by(|a, b| b.total_cmp(a));
        let rho = 10.0 * (1.0 - r.random::<f64>());
        let prob = Dpr1Problem::new(d, rho, mu).unwrap();
        let spec = solve(&prob).unwrap();
        let dense = jacobi_eigh(&prob.dense()).unwrap();
        let scale = prob.d[0].abs() + rho * prob.mu_norm_sq();
        for (a, b) in spec.values.iter().zip(&dense.values) {
            worst = worst.max((a - b).abs() / scale);
        }
        if spec.deflated.is_empty() {
            nondeflated += 1;
            if !strictly_separated(&prob, &spec.values) {
                separated_failures += 1;
            }
        }
    }
    outcome(
        worst <= 1e-9 && separated_failures == 0,
        format!("1000 problems, max scaled deviation {worst:.2e}, strict separation failed on {separated_failures}/{nondeflated} non-deflated"),
    )
}

/// Interlacing on generic data, and the partial-sum discrepancy on exactly parallel data.
fn criterion_4() -> Outcome {
    let mut r = rng(104);
    let mut strict_failures = 0;
    let mut min_rel_margin = f64::INFINITY;
    for _ in 0..200 {
        let p = r.random_range(2..=8);
        let n = r.random_range(p + 1..=40);
        let x = shifted_data(n, p, &mut r);
        let c = interlacing_check(&x).unwrap();
        let rel = c.min_margin / c.raw_sq[0];
        min_rel_margin = min_rel_margin.min(rel);
        if !c.margins.iter().all(|&m| m > 0.0) {
            strict_failures += 1;
        }
    }

    let mut non_strict_failures = 0;
    let mut worst_dk: f64 = 0.0;
    let mut worst_aligned: f64 = 0.0;
    let mut worst_vs_next: f64 = 0.0;
    for seed in 0..50 {
        let p = r.random_range(2..=8);
        let n = r.random_range(p + 2..=60);
        let x = generate(&SyntheticSpec::new(SyntheticKind::ParallelMean, n, p, 1000 + seed)).unwrap();
        let c = interlacing_check(&x).unwrap();
        if !c.non_strict {
            non_strict_failures += 1;
        }
        let top = c.raw_sq[0];
        for k in 1..p {
            let ps = partial_sum_check(&x, k, 0.1).unwrap();
            worst_dk = worst_dk.max(ps.discrepancy.abs() / top);
            worst_aligned = worst_aligned.max(ps.aligned_discrepancy.abs() / top);
            worst_vs_next = worst_vs_next.max((ps.discrepancy - c.centered_sq[k]).abs() / top);
        }
    }
    let pass = strict_failures == 0 && non_strict_failures == 0 && worst_dk <= 1e-8;
    outcome(
        pass,
        format!(
            "generic: strict chain failed on {strict_failures}/200 (min margin {min_rel_margin:.2e}·σ₁²); \
             parallel: non-strict failed on {non_strict_failures}/50, max |D_k| {worst_dk:.2e}·σ₁² (limit 1e-8); \
             for reference max |D_k - σ̄²_(k+1)| {worst_vs_next:.2e}·σ₁², max |‖X‖²_(2,k) - ‖X̄‖²_(2,k) - n‖x̄‖²| {worst_aligned:.2e}·σ₁²"
        ),
    )
}

/// Cap and sandwich implications on large-mean synthetics.
fn criterion_5() -> Outcome {
    let mut r = rng(105);
    let mut certified = 0;
    let mut counterexamples = 0;
    let mut min_cap_margin = f64::INFINITY;
    for seed in 0..100 {
        let eps = [0.1, 0.3, 0.5][seed % 3];
        let p = r.random_range(2..=8);
        let n = r.random_range(p + 2..=60);
        let mut spec = SyntheticSpec::new(SyntheticKind::LargeMean, n, p, 2000 + seed as u64);
        spec.epsilon = eps;
        let x = generate(&spec).unwrap();
        let bound = epsilon_membership(&x, eps).unwrap();
        if !bound.hypothesis_holds {
            continue;
        }
        certified += 1;
        min_cap_margin = min_cap_margin.min(bound.conclusion_margin);
        if !bound.conclusion_holds {
            counterexamples += 1;
        }
        for k in 1..p {
            if !partial_sum_check(&x, k, eps).unwrap().sandwich_holds {
                counterexamples += 1;
            }
        }
    }
    outcome(
        certified == 100 && counterexamples == 0,
        format!("{certified}/100 certified, {counterexamples} counterexamples, min cap margin {min_cap_margin:.3e}"),
    )
}

/// Partial-sum bound at the true rank of low-rank synthetics.
fn criterion_6() -> Outcome {
    let mut r = rng(106);
    let mut certified = 0;
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let p = r.random_range(3..=8);
        let n = r.random_range(p + 2..=60);
        let mut spec = SyntheticSpec::new(SyntheticKind::LowRank, n, p, 3000 + seed);
        spec.k_rank = r.random_range(1..p);
        let x = generate(&spec).unwrap();
        let check = partial_sum_check(&x, spec.k_rank, spec.epsilon).unwrap();
        if !check.hypothesis_holds {
            continue;
        }
        certified += 1;
        let ratio = check.discrepancy.abs() / check.upper_bound;
        worst = worst.max(ratio);
        if ratio >= 1.0 {
            violations += 1;
        }
    }
    outcome(
        certified == 50 && violations == 0,
        format!("{certified}/50 certified, {violations} violations, max |D_k|/σ̄₁² {worst:.2e}"),
    )
}

/// Iris end to end.
fn criterion_7() -> Outcome {
    let ds = ingest_csv(&iris_path(), true, Some(4)).unwrap();
    let x = &ds.data;
    let mean_norm = column_mean(x).iter().map(|m| m * m).sum::<f64>().sqrt();
    let s1 = scheme1(x, 2).unwrap();
    let s2 = scheme2(x, 2, false).unwrap();
    let res = procrustes(&s1.coords, &s2.coords).unwrap();
    let corr = res.axis_correlations();
    let pass = x.n() == 150 && x.p() == 4 && mean_norm > 0.0 && res.rmsd > 1e-6 && corr.iter().all(|&c| c > 0.9);
    outcome(
        pass,
        format!("n={} p={} ‖x̄‖={mean_norm:.4} rmsd={:.5} correlations {:?}", x.n(), x.p(), res.rmsd, corr),
    )
}

/// Procrustes optimality against random orthogonal candidates.
fn criterion_8() -> Outcome {
    let mut r = rng(108);
    let mut min_margin = f64::INFINITY;
    for _ in 0..100 {
        let k = r.random_range(1..=5);
        let n = r.random_range(k + 1..=40);
        let y = gaussian(n, k, &mut r);
        let z = gaussian(n, k, &mut r);
        let res = procrustes(&y, &z).unwrap();
        let best = res.reference.sub(&res.aligned).unwrap().frobenius_norm();
        let zc = normalize_embedding(&z);
        for _ in 0..100 {
            let q = random_orthogonal(k, &mut r);
            let other = res.reference.sub(&zc.matmul(&q).unwrap()).unwrap().frobenius_norm();
            min_margin = min_margin.min(other - best);
        }
    }
    outcome(min_margin >= -1e-10, format!("100 pairs x 100 candidates, min margin {min_margin:.3e}"))
}

/// Byte-identical reports from repeated runs.
fn criterion_9() -> Outcome {
    let input = InputSource::Csv { path: iris_path(), has_header: true, label_column: Some(4) };
    let mut config = RunConfig::new(input, 2);
    config.seed = 7;
    let a = to_json(&run(&config).unwrap().report).unwrap();
    let b = to_json(&run(&config).unwrap().report).unwrap();
    let direct = diagnose(
        &DataMatrix::new(ingest_csv(&iris_path(), true, Some(4)).unwrap().data.into_matrix()).unwrap(),
        &DiagnosticsConfig { seed: 7, ..DiagnosticsConfig::default() },
    )
    .unwrap();
    let c = serde_json::to_string(&direct).unwrap();
    let d = serde_json::to_string(&direct).unwrap();
    outcome(a == b && c == d, format!("{} bytes, identical: {}", a.len(), a == b))
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 scheme equivalence on centered data", criterion_1, Duration::from_secs(10)),
        ("2 parallel-mean SVD reconstruction", criterion_2, Duration::from_secs(10)),
        ("3 DPR1 secular solver vs dense", criterion_3, Duration::from_secs(30)),
        ("4 interlacing and parallel-case D_k", criterion_4, Duration::from_secs(20)),
        ("5 cap and sandwich implications", criterion_5, Duration::from_secs(30)),
        ("6 low-rank partial-sum bound", criterion_6, Duration::from_secs(10)),
        ("7 iris end to end", criterion_7, Duration::from_secs(5)),
        ("8 Procrustes optimality", criterion_8, Duration::from_secs(10)),
        ("9 deterministic JSON", criterion_9, Duration::from_secs(10)),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        let pass = out.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        println!(
            "[{}] criterion {name}: {} ({:.2} s, limit {} s)",
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
