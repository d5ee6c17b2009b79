//! The `green`, `solve`, `verify` and `bench` commands behind the binary.
//!
//! Each command writes human-readable lines to `out` and files under the
//! configured directories, and returns the process exit code.

mod config;

use std::fs;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

pub use config::{BenchConfig, IoConfig, RunConfig, CONFIG_KEYS};

use crate::error::{Error, Result};
use crate::functional::{Problem, ProblemSpec};
use crate::lattice::Field;
use crate::operators::ConvolutionMethod;
use crate::solver::{certify_solution, Algorithm, solve, CertificateReport, MountainPassInfo, RestartSummary};
use crate::spectral::{fit_decay_exponent, GreenTable};
use crate::store::{load_or_build_green, load_or_build_kernel, write_field, CacheStatus};
use crate::verify::{nonnegative_field, run_properties, VerifyReport};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_NOT_CONVERGED: u8 = 2;
pub const EXIT_CONSISTENCY: u8 = 3;

/// Exit code for an error that escaped a command.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Validation(_)
        | Error::Capacity { .. }
        | Error::LatticeMismatch(_)
        | Error::Format { .. }
        | Error::Io(_) => EXIT_VALIDATION,
        Error::NoProjection | Error::Divergence(_) => EXIT_NOT_CONVERGED,
        Error::Tolerance { .. } | Error::Consistency(_) | Error::Data(_) | Error::Geometry(_) => EXIT_CONSISTENCY,
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e)
}

fn cache_word(status: CacheStatus) -> &'static str {
    match status {
        CacheStatus::Hit => "hit",
        CacheStatus::Built => "built",
    }
}

/// Axis range used for the printed decay fit, or `None` on small boxes.
pub fn decay_fit_range(radius: usize) -> Option<(usize, usize)> {
    let lo = (radius / 4).max(2);
    (radius > lo).then_some((lo, radius))
}

/// Loads (or builds) both tables through the cache and assembles the problem.
pub fn load_problem(config: &RunConfig, out: &mut dyn Write) -> Result<Problem> {
    let spec = &config.problem;
    let dir = &config.io.cache_dir;
    fs::create_dir_all(dir)?;
    let (green, gs) = load_or_build_green(dir, spec.d, spec.alpha, spec.radius, spec.quadrature_points())?;
    let (kernel, ks) = load_or_build_kernel(dir, spec.kernel_model, spec.s, &spec.lattice()?)?;
    writeln!(out, "tables: Green's function {}, kernel {}", cache_word(gs), cache_word(ks)).map_err(io_err)?;
    spec.build_with_tables(green, kernel)
}

pub fn run_green(config: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let spec = &config.problem;
    fs::create_dir_all(&config.io.cache_dir)?;
    let start = Instant::now();
    let (table, status) =
        load_or_build_green(&config.io.cache_dir, spec.d, spec.alpha, spec.radius, spec.quadrature_points())?;
    let (_, kstatus) = load_or_build_kernel(&config.io.cache_dir, spec.kernel_model, spec.s, &spec.lattice()?)?;
    let elapsed = start.elapsed().as_secs_f64();
    print_green(&table, out).map_err(io_err)?;
    writeln!(out, "cache = {} (kernel {}), {elapsed:.3} s", cache_word(status), cache_word(kstatus)).map_err(io_err)?;
    Ok(EXIT_OK)
}

fn print_green(table: &GreenTable, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "d = {}, alpha = {}, L = {}, N = {}", table.dim(), table.alpha(), table.radius(), table.quad_points())?;
    writeln!(out, "K_alpha = {:.12}", table.k_alpha())?;
    match decay_fit_range(table.radius()).map(|(lo, hi)| (lo, hi, fit_decay_exponent(table, lo, hi))) {
        Some((lo, hi, Ok(fit))) => writeln!(
            out,
            "decay slope = {:.6} (axis fit on |x| in [{lo}, {hi}], expected {})",
            fit.slope,
            -(table.dim() as f64 - table.alpha())
        )?,
        Some((_, _, Err(e))) => writeln!(out, "decay slope unavailable: {e}")?,
        None => writeln!(out, "decay slope = n/a (box too small)")?,
    }
    writeln!(out, "refinement delta = {:e}", table.refinement_delta())
}

#[derive(Serialize)]
struct SolveSection {
    algorithm: &'static str,
    converged: bool,
    certified: bool,
    level: f64,
    nehari_residual: f64,
    norm_p: f64,
    grad_supnorm: f64,
    min_value: f64,
    iterations: usize,
    restart_spread: f64,
    projection_failures: usize,
    wall_time: f64,
}

#[derive(Serialize)]
struct SolveReport<'a> {
    result: SolveSection,
    certificate: &'a CertificateReport,
    restarts: &'a [RestartSummary],
    #[serde(skip_serializing_if = "Option::is_none")]
    mountain_pass: Option<&'a MountainPassInfo>,
    notes: &'a [String],
    config: &'a RunConfig,
}

pub fn run_solve(config: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let problem = load_problem(config, out)?;
    let sol = solve(&config.solver, &problem)?;
    let cert = certify_solution(&sol, &problem)?;
    let certified = cert.passes(config.solver.tol_grad);

    let dir = &config.io.output_dir;
    fs::create_dir_all(dir)?;
    let report = SolveReport {
        result: SolveSection {
            algorithm: match sol.algorithm {
                Algorithm::NehariDescent => "nehari-descent",
                Algorithm::MountainPass => "mountain-pass",
            },
            converged: sol.converged,
            certified,
            level: sol.level,
            nehari_residual: sol.nehari_residual,
            norm_p: sol.norm_p,
            grad_supnorm: sol.grad_supnorm,
            min_value: sol.min_value,
            iterations: sol.iterations,
            restart_spread: sol.level_spread,
            projection_failures: sol.projection_failures,
            wall_time: sol.wall_time,
        },
        certificate: &cert,
        restarts: &sol.restarts,
        mountain_pass: sol.mountain_pass.as_ref(),
        notes: &sol.notes,
        config,
    };
    let text = toml::to_string(&report).map_err(|e| Error::Consistency(format!("report serialization: {e}")))?;
    fs::write(dir.join("report.toml"), text)?;
    write_field(&dir.join("field.csv"), &sol.u)?;
    if config.io.trace {
        let mut lines = String::new();
        for rec in &sol.trace {
            lines.push_str(&serde_json::to_string(rec).expect("trace record serializes"));
            lines.push('\n');
        }
        fs::write(dir.join("trace.jsonl"), lines)?;
    }

    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "level = {:.12}", sol.level)?;
        writeln!(out, "grad_supnorm = {:e} (tol {:e})", sol.grad_supnorm, config.solver.tol_grad)?;
        writeln!(out, "nehari_residual = {:e}", sol.nehari_residual)?;
        writeln!(out, "min_value = {:e}", sol.min_value)?;
        writeln!(out, "iterations = {}, restarts = {}, spread = {:e}", sol.iterations, sol.restarts.len(), sol.level_spread)?;
        writeln!(out, "wall_time = {:.2} s", sol.wall_time)?;
        for note in &sol.notes {
            writeln!(out, "note: {note}")?;
        }
        writeln!(out, "report written to {}", dir.join("report.toml").display())
    };
    w(out).map_err(io_err)?;

    if !sol.converged {
        writeln!(out, "not converged").map_err(io_err)?;
        return Ok(EXIT_NOT_CONVERGED);
    }
    if !certified {
        writeln!(
            out,
            "certificate failed: {}",
            cert.rejected.as_deref().or(cert.declined.as_deref()).unwrap_or("residual or identity check")
        )
        .map_err(io_err)?;
        return Ok(EXIT_CONSISTENCY);
    }
    writeln!(out, "converged and certified").map_err(io_err)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct VerifyFile<'a> {
    seed: u64,
    samples: usize,
    all_passed: bool,
    empirical: &'a crate::verify::Empirical,
    properties: Vec<VerifyEntry<'a>>,
}

#[derive(Serialize)]
struct VerifyEntry<'a> {
    name: &'a str,
    anchor: &'a str,
    passed: bool,
    cases: usize,
    worst_margin: f64,
    detail: &'a str,
    /// JSON text; TOML has no null.
    #[serde(skip_serializing_if = "Option::is_none")]
    failing_case: Option<String>,
}

/// The verification report as written to `verify.toml`.
pub fn verify_report_toml(report: &VerifyReport) -> String {
    let file = VerifyFile {
        seed: report.seed,
        samples: report.samples,
        all_passed: report.all_passed,
        empirical: &report.empirical,
        properties: report
            .properties
            .iter()
            .map(|p| VerifyEntry {
                name: &p.name,
                anchor: &p.anchor,
                passed: p.passed,
                cases: p.cases,
                worst_margin: p.worst_margin,
                detail: &p.detail,
                failing_case: p.failing_case.as_ref().map(|v| v.to_string()),
            })
            .collect(),
    };
    toml::to_string(&file).expect("verify report serializes")
}

pub fn run_verify(config: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let problem = load_problem(config, out)?;
    let start = Instant::now();
    let report = run_properties(&problem, &config.problem, &config.verify)?;
    fs::create_dir_all(&config.io.output_dir)?;
    let path = config.io.output_dir.join("verify.toml");
    fs::write(&path, verify_report_toml(&report))?;
    for p in &report.properties {
        writeln!(
            out,
            "{} {:<28} worst margin {:>12.4e}  ({})",
            if p.passed { "PASS" } else { "FAIL" },
            p.name,
            p.worst_margin,
            p.anchor
        )
        .map_err(io_err)?;
        if let Some(case) = &p.failing_case {
            writeln!(out, "     failing case: {case}").map_err(io_err)?;
        }
    }
    writeln!(out, "{:.2} s, report written to {}", start.elapsed().as_secs_f64(), path.display()).map_err(io_err)?;
    Ok(if report.all_passed { EXIT_OK } else { EXIT_CONSISTENCY })
}

/// One row of the timing table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub radius: usize,
    pub sites: usize,
    pub direct_s: f64,
    pub fft_s: f64,
    pub energy_gradient_s: f64,
    /// `max |fft - direct| / max |direct|`.
    pub discrepancy: f64,
}

fn min_time<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut best = f64::INFINITY;
    let mut last = None;
    for _ in 0..repeats {
        let t = Instant::now();
        let v = f()?;
        best = best.min(t.elapsed().as_secs_f64());
        last = Some(v);
    }
    Ok((best, last.expect("repeats >= 1")))
}

/// Times both convolution paths and a full energy and gradient evaluation
/// on boxes of the configured radii.
pub fn bench_rows(config: &RunConfig) -> Result<Vec<BenchRow>> {
    if config.bench.sizes.is_empty() {
        return Err(Error::validation("bench.sizes is empty"));
    }
    fs::create_dir_all(&config.io.cache_dir)?;
    let mut rows = Vec::new();
    for &radius in &config.bench.sizes {
        let spec = ProblemSpec {
            radius,
            quadrature_n: 0,
            ..config.problem.clone()
        };
        spec.validate()?;
        let dir = &config.io.cache_dir;
        let (green, _) = load_or_build_green(dir, spec.d, spec.alpha, radius, spec.quadrature_points())?;
        let (kernel, _) = load_or_build_kernel(dir, spec.kernel_model, spec.s, &spec.lattice()?)?;
        let problem = spec.build_with_tables(green, kernel)?;
        let g = nonnegative_field(*problem.lattice(), config.solver.seed);
        let conv = problem.convolver();
        let (direct_s, direct) = min_time(config.bench.repeats, || conv.convolve(&g, ConvolutionMethod::Direct))?;
        let (fft_s, fft) = min_time(config.bench.repeats, || conv.convolve(&g, ConvolutionMethod::Fft))?;
        let (energy_gradient_s, _) = min_time(config.bench.repeats, || problem.evaluate(&g, true))?;
        let scale = direct.sup_norm().max(f64::MIN_POSITIVE);
        let discrepancy = max_abs_diff(&fft, &direct) / scale;
        rows.push(BenchRow { radius, sites: g.values().len(), direct_s, fft_s, energy_gradient_s, discrepancy });
    }
    Ok(rows)
}

fn max_abs_diff(a: &Field, b: &Field) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run_bench(config: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let rows = bench_rows(config)?;
    fs::create_dir_all(&config.io.output_dir)?;
    let mut csv = String::from("L,sites,direct_s,fft_s,energy_gradient_s,discrepancy\n");
    let w = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "{:>4} {:>8} {:>12} {:>12} {:>8} {:>14} {:>12}", "L", "sites", "direct s", "fft s", "speedup", "energy+grad s", "discrepancy")?;
        for r in &rows {
            writeln!(
                out,
                "{:>4} {:>8} {:>12.6} {:>12.6} {:>8.2} {:>14.6} {:>12.3e}",
                r.radius,
                r.sites,
                r.direct_s,
                r.fft_s,
                r.direct_s / r.fft_s,
                r.energy_gradient_s,
                r.discrepancy
            )?;
        }
        Ok(())
    };
    w(out).map_err(io_err)?;
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{:?},{:?},{:?},{:?}\n",
            r.radius, r.sites, r.direct_s, r.fft_s, r.energy_gradient_s, r.discrepancy
        ));
    }
    fs::write(config.io.output_dir.join("bench.csv"), csv)?;
    if let Some(bad) = rows.iter().find(|r| !(r.discrepancy <= 1e-10)) {
        writeln!(out, "convolution paths disagree at L = {}: {:e} > 1e-10", bad.radius, bad.discrepancy).map_err(io_err)?;
        return Ok(EXIT_CONSISTENCY);
    }
    Ok(EXIT_OK)
}
