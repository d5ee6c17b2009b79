//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines are printed on every
//! `cargo test`; the process fails if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use choquard_lattice::functional::{Problem, ProblemSpec};
use choquard_lattice::lattice::LatticeBox;
use choquard_lattice::operators::{p_inequality_slack, ConvolutionMethod, GreenConvolver, KernelModel, KernelOperator, KernelTable};
use choquard_lattice::solver::{certify_solution, solve_ground_state, solve_mountain_pass, Algorithm, InitKind, SolverConfig, FLOOR_SLACK};
use choquard_lattice::spectral::{compute_green_table, compute_k_alpha, fit_decay_exponent};
use choquard_lattice::verify::{gradient_fd_error, integration_by_parts_sides, nonnegative_field, sign_decomposition_margin, signed_field};
use choquard_lattice::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// d = 2, L = 15, s = 0.5, p = 2, alpha = 1, tau = 2.5, h = 1 + |x|_1.
fn acceptance_problem() -> Result<Problem> {
    ProblemSpec::new(2, 15, 0.5, 2.0, 1.0, 2.5).build()
}

fn green_decay() -> Result<Outcome> {
    let start = Instant::now();
    let table = compute_green_table(2, 1.0, 40, 256)?;
    let fit = fit_decay_exponent(&table, 10, 40)?;
    let secs = start.elapsed().as_secs_f64();
    outcome(
        (fit.slope + 1.0).abs() <= 0.15 && secs <= 120.0,
        format!("slope {:.4} on |x| in [10, 40] (target -1 +- 0.15), {secs:.1} s", fit.slope),
    )
}

fn k_alpha_anchor() -> Result<Outcome> {
    let k = compute_k_alpha(3, 2.0, 96)?;
    outcome(rel(k, 6.0) <= 1e-6, format!("K_alpha = {k:.12}, relative error {:.2e}", rel(k, 6.0)))
}

fn integration_by_parts() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let d = 1 + i % 2;
        let p = [2.0, 3.0, 4.0][i % 3];
        let lattice = LatticeBox::new(d, rng.random_range(1..=6))?;
        let op = KernelOperator::new(lattice, KernelTable::build(KernelModel::PowerLaw, 0.5, &lattice)?)?;
        let u = signed_field(lattice, rng.random());
        let phi = signed_field(lattice, rng.random());
        let (lhs, rhs) = integration_by_parts_sides(&op, &u, &phi, p)?;
        worst = worst.max(rel(lhs, rhs));
    }
    outcome(worst <= 1e-10, format!("100 pairs, worst relative gap {worst:.2e} (tol 1e-10)"))
}

fn gradient_batch(problem: &Problem, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lattice = *problem.lattice();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let u = nonnegative_field(lattice, rng.random()).map(|v| v + 0.5);
        let g = problem.energy_gradient(&u)?;
        let cut = 0.05 * g.sup_norm();
        let sites: Vec<usize> = (0..lattice.len()).filter(|&i| g.values()[i].abs() >= cut).take(8).collect();
        worst = worst.max(gradient_fd_error(problem, &u, &sites, 1e-5)?);
    }
    Ok(worst)
}

fn gradient_correctness(acceptance: &Problem) -> Result<Outcome> {
    let p2 = gradient_batch(acceptance, 4)?;
    let p3_problem = ProblemSpec::new(2, 6, 0.5, 3.0, 1.0, 3.5).build()?;
    let p3 = gradient_batch(&p3_problem, 5)?;
    outcome(
        p2 <= 1e-6 && p3 <= 1e-5,
        format!("20 fields each: p = 2 worst {p2:.2e} (tol 1e-6), p = 3 worst {p3:.2e} (tol 1e-5)"),
    )
}

fn convolution_oracle() -> Result<Outcome> {
    let lattice = LatticeBox::new(2, 16)?;
    let conv = GreenConvolver::new(lattice, compute_green_table(2, 1.0, 16, 256)?)?;
    let mut worst = 0.0f64;
    for seed in 0..10 {
        let g = signed_field(lattice, seed);
        let direct = conv.convolve(&g, ConvolutionMethod::Direct)?;
        let fft = conv.convolve(&g, ConvolutionMethod::Fft)?;
        let diff = direct.values().iter().zip(fft.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        worst = worst.max(diff / direct.sup_norm());
    }
    outcome(worst <= 1e-10, format!("10 fields, d = 2, L = 16: max |fft - direct| / scale {worst:.2e} (tol 1e-10)"))
}

fn nehari_projection(problem: &Problem) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut agree, mut resid, mut fixed) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let u = nonnegative_field(*problem.lattice(), rng.random());
        let closed = problem.nehari_project_closed_form(&u)?;
        let bisect = problem.nehari_project_bisection(&u)?;
        agree = agree.max(rel(closed.t, bisect.t));
        let eval = problem.evaluate(&closed.v, false)?;
        resid = resid.max(eval.nehari_residual().abs() / eval.norm_p);
        fixed = fixed.max((problem.nehari_project(&closed.v)?.t - 1.0).abs());
    }
    outcome(
        agree <= 1e-8 && resid <= 1e-10 && fixed <= 1e-10,
        format!("50 rays: closed vs bisection {agree:.2e} (1e-8), residual {resid:.2e} (1e-10), |t - 1| on manifold {fixed:.2e} (1e-10)"),
    )
}

fn sign_decomposition(problem: &Problem) -> Result<Outcome> {
    let mut worst = f64::INFINITY;
    for seed in 0..200 {
        let u = signed_field(*problem.lattice(), 1000 + seed);
        let (margin, _) = sign_decomposition_margin(problem.operator(), &u, problem.p())?;
        worst = worst.min(margin);
    }
    outcome(
        worst >= 0.0,
        format!("200 signed fields: exact sum and product, forms and energy bound to 1e-12; worst margin {worst:.2e}"),
    )
}

fn mountain_pass_geometry(problem: &Problem) -> Result<Outcome> {
    let rho = 0.1;
    let p = problem.p();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut sigma = f64::INFINITY;
    for i in 0..1000 {
        let w = if i % 2 == 0 {
            nonnegative_field(*problem.lattice(), rng.random())
        } else {
            signed_field(*problem.lattice(), rng.random())
        };
        let u = w.scaled(rho / problem.norm_p(&w)?.powf(1.0 / p));
        sigma = sigma.min(problem.energy(&u)?.total);
    }
    let bump = choquard_lattice::solver::bump_field(*problem.lattice());
    let mut t = 1.0f64;
    while problem.energy(&bump.scaled(t))?.total >= 0.0 && t < 2f64.powi(60) {
        t *= 2.0;
    }
    let e = bump.scaled(t);
    let je = problem.energy(&e)?.total;
    let norm_e = problem.norm_p(&e)?.powf(1.0 / p);
    outcome(
        sigma > 0.0 && je < 0.0 && norm_e > rho,
        format!("min J on |u|_H = {rho} over 1000 directions {sigma:.3e} > 0; J(e) = {je:.3e} < 0 at t = {t}, |e|_H = {norm_e:.2}"),
    )
}

fn ground_state(problem: &Problem) -> Result<Outcome> {
    let start = Instant::now();
    let config = SolverConfig { restarts: 2, init: InitKind::Bump, ..Default::default() };
    let sol = solve_ground_state(&config, problem)?;
    let secs = start.elapsed().as_secs_f64();
    let cert = certify_solution(&sol, problem)?;
    let levels: Vec<f64> = sol.restarts.iter().map(|r| r.level).collect();
    let agree = levels.len() == 2 && rel(levels[0], levels[1]) <= 1e-4 && sol.restarts.iter().all(|r| r.converged);
    let floor_ok = sol.level > 0.0 && sol.level >= cert.level_floor - FLOOR_SLACK * cert.norm_p;
    outcome(
        sol.converged && sol.grad_supnorm <= 1e-6 && sol.min_value > 0.0 && agree && floor_ok && secs <= 600.0,
        format!(
            "level {:.10}, scaled gradient {:.2e}, min u {:.2e}, restart levels {levels:.10?}, floor {:.10}, {secs:.1} s",
            sol.level, sol.grad_supnorm, sol.min_value, cert.level_floor
        ),
    )
}

fn cross_algorithm() -> Result<Outcome> {
    let problem = ProblemSpec::new(1, 8, 0.5, 2.0, 0.5, 2.5).build()?;
    let nehari = solve_ground_state(&SolverConfig::default(), &problem)?;
    let mp = solve_mountain_pass(&SolverConfig { algorithm: Algorithm::MountainPass, ..Default::default() }, &problem)?;
    let gap = rel(mp.level, nehari.level);
    outcome(
        gap <= 5e-3,
        format!("mountain pass {:.10} vs Nehari {:.10}, relative gap {gap:.2e} (tol 5e-3)", mp.level, nehari.level),
    )
}

fn superlinearity(problem: &Problem) -> Result<Outcome> {
    let theta = problem.theta();
    let mut worst = 0.0f64;
    for seed in 0..20 {
        let u = nonnegative_field(*problem.lattice(), 500 + seed);
        let base = problem.choquard_energy(&u)?;
        for t in [1.0, 1.5, 2.0, 4.0] {
            worst = worst.max(rel(problem.choquard_energy(&u.scaled(t))?, t.powf(theta) * base));
        }
    }
    outcome(worst <= 1e-10, format!("theta = {theta}, 20 fields, t in {{1, 1.5, 2, 4}}: worst {worst:.2e} (tol 1e-10)"))
}

fn p_inequality() -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = f64::INFINITY;
    for _ in 0..10_000 {
        let a: f64 = rng.random_range(-10.0..10.0);
        let b: f64 = rng.random_range(-10.0..10.0);
        let p: f64 = rng.random_range(2.0..=4.0);
        worst = worst.min(p_inequality_slack(a, b, p));
    }
    outcome(worst >= 0.0, format!("10^4 triples, smallest slack {worst:.3e}"))
}

fn main() -> ExitCode {
    let problem = match acceptance_problem() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot build the acceptance problem: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<Outcome> + '_>)> = vec![
        ("Green decay", Box::new(green_decay)),
        ("K_alpha analytic anchor", Box::new(k_alpha_anchor)),
        ("integration by parts", Box::new(integration_by_parts)),
        ("gradient correctness", Box::new(|| gradient_correctness(&problem))),
        ("convolution oracle", Box::new(convolution_oracle)),
        ("Nehari projection", Box::new(|| nehari_projection(&problem))),
        ("sign decomposition", Box::new(|| sign_decomposition(&problem))),
        ("mountain-pass geometry", Box::new(|| mountain_pass_geometry(&problem))),
        ("ground-state solve", Box::new(|| ground_state(&problem))),
        ("cross-algorithm check", Box::new(cross_algorithm)),
        ("superlinearity identity", Box::new(|| superlinearity(&problem))),
        ("scalar p-inequality", Box::new(p_inequality)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (passed, detail) = match run() {
            Ok(o) => (o.passed, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!passed);
        println!("{} {:>2} {name}: {detail}", if passed { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
