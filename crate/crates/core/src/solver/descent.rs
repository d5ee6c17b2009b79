use std::time::Instant;

use crate::error::{Error, Result};
use crate::functional::{Evaluation, Problem};
use crate::lattice::Field;

use super::config::{InitKind, SolverConfig};
use super::init::initial_field;
use super::{scaled_supnorm, Algorithm, RestartSummary, Solution, TraceRecord};

/// Backtracking gives up once the step falls this far below `step0`.
const MIN_STEP_RATIO: f64 = 1e-14;
/// Steps never grow beyond `step0` times this.
const MAX_STEP_RATIO: f64 = 1e6;

struct Run {
    u: Field,
    eval: Evaluation,
    grad_supnorm: f64,
    iterations: usize,
    converged: bool,
    trace: Vec<TraceRecord>,
    note: Option<String>,
}

/// Minimizes `J` over the Nehari manifold by projected gradient steps.
///
/// Start 0 uses `config.init`; later starts use random positive fields with
/// seeds `seed + k`. The lowest converged level is returned.
pub fn solve_ground_state(config: &SolverConfig, problem: &Problem) -> Result<Solution> {
    config.validate()?;
    let started = Instant::now();
    let lattice = *problem.lattice();
    let mut notes = Vec::new();
    let mut runs: Vec<(RestartSummary, Run)> = Vec::new();
    let mut failures = 0;
    let mut k = 0u64;
    while runs.len() < config.restarts {
        let (kind, seed) = if k == 0 {
            (config.init, config.seed)
        } else {
            (InitKind::RandomPositive, config.seed.wrapping_add(k))
        };
        k += 1;
        let mut u0 = initial_field(config, kind, lattice, seed)?;
        if u0.positive_part().is_zero() {
            u0 = u0.scaled(-1.0);
            notes.push(format!("start {}: initial field had no positive part and was negated", k - 1));
        }
        match descend(config, problem, u0) {
            Ok(run) => {
                let summary = RestartSummary {
                    index: runs.len(),
                    init: kind,
                    seed,
                    level: run.eval.energy.total,
                    grad_supnorm: run.grad_supnorm,
                    iterations: run.iterations,
                    converged: run.converged,
                };
                if let Some(note) = &run.note {
                    notes.push(format!("start {}: {note}", k - 1));
                }
                runs.push((summary, run));
            }
            Err(Error::NoProjection) => {
                failures += 1;
                notes.push(format!("start {}: projection failed, restarting", k - 1));
                if failures > config.restarts {
                    return Err(Error::NoProjection);
                }
            }
            Err(e) => return Err(e),
        }
    }

    let levels: Vec<f64> = runs.iter().map(|(s, _)| s.level).collect();
    let lo = levels.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = levels.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let level_spread = if runs.len() > 1 { (hi - lo) / lo.abs() } else { 0.0 };

    let any_converged = runs.iter().any(|(_, r)| r.converged);
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| r.converged || !any_converged)
        .min_by(|a, b| a.1 .0.level.total_cmp(&b.1 .0.level))
        .map(|(i, _)| i)
        .expect("at least one start");
    let summaries: Vec<RestartSummary> = runs.iter().map(|(s, _)| s.clone()).collect();
    let (_, run) = runs.swap_remove(best);
    let grad = run.eval.gradient.as_ref().expect("gradient kept");
    Ok(Solution {
        algorithm: Algorithm::NehariDescent,
        level: run.eval.energy.total,
        nehari_residual: run.eval.nehari_residual(),
        norm_p: run.eval.norm_p,
        grad_supnorm: run.grad_supnorm,
        grad_supnorm_raw: grad.sup_norm(),
        min_value: run.u.min_value(),
        iterations: run.iterations,
        wall_time: started.elapsed().as_secs_f64(),
        converged: run.converged,
        restarts: summaries,
        level_spread,
        projection_failures: failures,
        notes,
        trace: run.trace,
        mountain_pass: None,
        u: run.u,
    })
}

fn descend(config: &SolverConfig, problem: &Problem, u0: Field) -> Result<Run> {
    let p = problem.p();
    let armijo = config.armijo;
    let mut u = problem.nehari_project(&u0)?.v;
    let mut eval = problem.evaluate(&u, true)?;
    let mut step = config.step0;
    let mut trace = Vec::new();
    let mut note = None;
    let mut converged = false;
    let mut iterations = 0;
    let mut grad_supnorm;

    loop {
        let g = eval.gradient.as_ref().expect("gradient requested");
        grad_supnorm = scaled_supnorm(g, &u, p);
        if grad_supnorm <= config.tol_grad {
            converged = true;
            break;
        }
        if iterations >= config.max_iter {
            break;
        }
        let gg = g.dot(g)?;
        let level = eval.energy.total;
        let mut eta = step;
        let mut accepted = None;
        while eta >= MIN_STEP_RATIO * config.step0 {
            let trial = u.axpy(-eta, g)?;
            match problem.nehari_project(&trial) {
                Ok(proj) => {
                    let trial_eval = problem.evaluate(&proj.v, true)?;
                    if trial_eval.energy.total <= level - armijo.c1 * eta * gg {
                        accepted = Some((proj.v, proj.t, trial_eval));
                        break;
                    }
                }
                Err(Error::NoProjection) => {}
                Err(e) => return Err(e),
            }
            eta *= armijo.factor;
        }
        let Some((v, t, v_eval)) = accepted else {
            note = Some(format!(
                "line search stalled at iteration {iterations} with scaled gradient {grad_supnorm:e}"
            ));
            break;
        };
        trace.push(TraceRecord { iteration: iterations, level, grad_norm: grad_supnorm, t_u: t, step: eta });
        iterations += 1;
        u = v;
        eval = v_eval;
        step = (eta / armijo.factor).min(MAX_STEP_RATIO * config.step0);
    }
    Ok(Run { u, eval, grad_supnorm, iterations, converged, trace, note })
}
