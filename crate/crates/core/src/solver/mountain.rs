use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::functional::Problem;
use crate::lattice::Field;

use super::config::{Armijo, SolverConfig};
use super::init::initial_field;
use super::{scaled_supnorm, Algorithm, RestartSummary, Solution, TraceRecord};

/// Ray growth limit for the endpoint scan, `2^60`.
const RAY_LIMIT: f64 = 1_152_921_504_606_846_976.0;
const GOLDEN_STEPS: usize = 40;
const MIN_STEP_RATIO: f64 = 1e-14;
const MAX_STEP_RATIO: f64 = 1e6;
/// The top node starts climbing once the path maximum moves by less than
/// this, relative, between two re-equalizations.
const SETTLE_TOLERANCE: f64 = 1e-5;
/// Bisection steps pulling the endpoint back towards `J = 0`.
const ENDPOINT_BISECTIONS: usize = 6;

/// A discretized path from 0 to an endpoint with negative energy.
#[derive(Debug, Clone)]
pub struct PathState {
    pub nodes: Vec<Field>,
    pub levels: Vec<f64>,
    pub max_index: usize,
    pub max_level: f64,
}

impl PathState {
    fn straight(problem: &Problem, e: &Field, count: usize) -> Result<Self> {
        let nodes: Vec<Field> = (0..count).map(|i| e.scaled(i as f64 / (count - 1) as f64)).collect();
        Self::from_nodes(problem, nodes)
    }

    fn from_nodes(problem: &Problem, nodes: Vec<Field>) -> Result<Self> {
        let levels = nodes
            .iter()
            .map(|n| Ok(problem.energy(n)?.total))
            .collect::<Result<Vec<f64>>>()?;
        let mut state = Self { nodes, levels, max_index: 0, max_level: 0.0 };
        state.locate_max();
        Ok(state)
    }

    fn locate_max(&mut self) {
        let last = self.nodes.len() - 1;
        let (i, v) = self.levels[1..last]
            .iter()
            .enumerate()
            .fold((1, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i + 1, v) } else { acc });
        self.max_index = i;
        self.max_level = v;
    }

    /// Unit secant through the neighbours of node `k`, and the distances
    /// from node `k` to each neighbour.
    fn tangent(&self, k: usize) -> Result<(Field, f64, f64)> {
        let secant = self.nodes[k + 1].axpy(-1.0, &self.nodes[k - 1])?;
        let norm = secant.dot(&secant)?.sqrt();
        let back = self.nodes[k].axpy(-1.0, &self.nodes[k - 1])?;
        let ahead = self.nodes[k + 1].axpy(-1.0, &self.nodes[k])?;
        Ok((secant.scaled(1.0 / norm), back.dot(&back)?.sqrt(), ahead.dot(&ahead)?.sqrt()))
    }

    /// Moves node `k` to the golden-section maximum of `J` on its tangent
    /// line, within half the distance to either neighbour.
    fn climb(&mut self, problem: &Problem, k: usize) -> Result<()> {
        let (tangent, back, ahead) = self.tangent(k)?;
        let ratio = 0.5 * (5f64.sqrt() - 1.0);
        let node = self.nodes[k].clone();
        let level_at = |s: f64| -> Result<f64> { Ok(problem.energy(&node.axpy(s, &tangent)?)?.total) };
        let (mut a, mut b) = (-0.5 * back, 0.5 * ahead);
        let mut c = b - ratio * (b - a);
        let mut d = a + ratio * (b - a);
        let (mut fc, mut fd) = (level_at(c)?, level_at(d)?);
        for _ in 0..GOLDEN_STEPS {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - ratio * (b - a);
                fc = level_at(c)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + ratio * (b - a);
                fd = level_at(d)?;
            }
        }
        let (s, f) = if fc > fd { (c, fc) } else { (d, fd) };
        if f > self.levels[k] {
            self.nodes[k] = node.axpy(s, &tangent)?;
            self.levels[k] = f;
        }
        Ok(())
    }

    /// Respaces the nodes strictly between `lo` and `hi` evenly in
    /// Euclidean arc length along the current polyline.
    fn reequalize(&mut self, problem: &Problem, lo: usize, hi: usize) -> Result<()> {
        if hi <= lo + 1 {
            return Ok(());
        }
        let mut arc = vec![0.0; hi - lo + 1];
        for i in lo + 1..=hi {
            let diff = self.nodes[i].axpy(-1.0, &self.nodes[i - 1])?;
            arc[i - lo] = arc[i - lo - 1] + diff.dot(&diff)?.sqrt();
        }
        let total = arc[hi - lo];
        let mut fresh = Vec::with_capacity(hi - lo - 1);
        let mut seg = 1;
        for i in 1..hi - lo {
            let target = total * i as f64 / (hi - lo) as f64;
            while arc[seg] < target && seg < hi - lo {
                seg += 1;
            }
            let len = arc[seg] - arc[seg - 1];
            let w = if len > 0.0 { (target - arc[seg - 1]) / len } else { 0.0 };
            let base = &self.nodes[lo + seg - 1];
            fresh.push(base.axpy(w, &self.nodes[lo + seg].axpy(-1.0, base)?)?);
        }
        for (i, node) in fresh.into_iter().enumerate() {
            self.levels[lo + 1 + i] = problem.energy(&node)?.total;
            self.nodes[lo + 1 + i] = node;
        }
        Ok(())
    }
}

/// Armijo descent along `direction`, with the move length capped at `reach`.
fn armijo_move(
    problem: &Problem,
    node: &Field,
    level: f64,
    direction: &Field,
    step: f64,
    reach: f64,
    armijo: Armijo,
    min_step: f64,
) -> Result<Option<(Field, f64, f64)>> {
    let dd = direction.dot(direction)?;
    if dd == 0.0 {
        return Ok(None);
    }
    let mut eta = step.min(reach / dd.sqrt());
    while eta >= min_step {
        let trial = node.axpy(-eta, direction)?;
        let trial_level = problem.energy(&trial)?.total;
        if trial_level <= level - armijo.c1 * eta * dd {
            return Ok(Some((trial, trial_level, eta)));
        }
        eta *= armijo.factor;
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MountainPassInfo {
    /// `J(e)`, negative by construction.
    pub endpoint_level: f64,
    /// `|e|_H`.
    pub endpoint_norm: f64,
    /// Multiple of the initial field used as endpoint.
    pub endpoint_scale: f64,
    /// Maximum over the initial straight path.
    pub initial_max_level: f64,
    pub max_index: usize,
    pub path_nodes: usize,
    /// Sweep at which the top node started climbing, if it did.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub climb_from: Option<usize>,
}

/// Finds `e = t u0` with `J(e) < 0`: `t` doubles until the energy turns
/// negative, then bisects back towards the sign change so that most path
/// nodes land on the positive side.
pub(crate) fn ray_endpoint(problem: &Problem, u0: &Field) -> Result<(Field, f64, f64)> {
    let level_at = |t: f64| -> Result<f64> { Ok(problem.energy(&u0.scaled(t))?.total) };
    let mut hi = 1.0f64;
    let mut hi_level = level_at(hi)?;
    while hi_level >= 0.0 {
        hi *= 2.0;
        if hi > RAY_LIMIT {
            return Err(Error::Geometry(
                "no point with negative energy on the initial ray up to scale 2^60".into(),
            ));
        }
        hi_level = level_at(hi)?;
    }
    let mut lo = 0.5 * hi;
    for _ in 0..ENDPOINT_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let level = level_at(mid)?;
        if level < 0.0 {
            hi = mid;
            hi_level = level;
        } else {
            lo = mid;
        }
    }
    Ok((u0.scaled(hi), hi, hi_level))
}

/// Deforms the straight path from 0 to a negative-energy endpoint.
///
/// Every interior node with positive level takes an Armijo step against the part of its gradient
/// across the path, capped at half the spacing to its neighbours, and the
/// nodes are respaced by arc length every `reequalize_every` sweeps. Once the
/// path maximum settles the top node is pinned: it keeps descending across
/// the path and is re-maximized along it, which drives it to the saddle. The
/// pinned node is the candidate critical point.
pub fn solve_mountain_pass(config: &SolverConfig, problem: &Problem) -> Result<Solution> {
    config.validate()?;
    let started = Instant::now();
    let p = problem.p();
    let min_step = MIN_STEP_RATIO * config.step0;
    let mut notes = Vec::new();
    let mut u0 = initial_field(config, config.init, *problem.lattice(), config.seed)?;
    if u0.positive_part().is_zero() {
        u0 = u0.scaled(-1.0);
        notes.push("initial field had no positive part and was negated".to_string());
    }
    let (e, scale, endpoint_level) = ray_endpoint(problem, &u0)?;
    let endpoint_norm = problem.norm_p(&e)?.powf(1.0 / p);
    let count = config.path_nodes;
    let mut path = PathState::straight(problem, &e, count)?;
    let initial_max_level = path.max_level;

    let mut steps = vec![config.step0; count];
    let mut climbing: Option<usize> = None;
    let mut climb_from = None;
    let mut settled = f64::INFINITY;
    let mut trace = Vec::new();
    let mut sweeps = 0;
    let mut converged = false;
    let (mut grad_supnorm, mut grad_raw);
    loop {
        let top = climbing.unwrap_or(path.max_index);
        if climbing.is_some() {
            path.climb(problem, top)?;
        }
        let top_grad = problem.energy_gradient(&path.nodes[top])?;
        grad_supnorm = scaled_supnorm(&top_grad, &path.nodes[top], p);
        grad_raw = top_grad.sup_norm();
        if grad_supnorm <= config.tol_grad {
            converged = true;
            break;
        }
        if sweeps >= config.max_iter {
            break;
        }
        let top_level = path.levels[top];
        for i in 1..count - 1 {
            // Past the pass J is unbounded below; those nodes stay put.
            if path.levels[i] <= 0.0 {
                continue;
            }
            let g = if i == top { top_grad.clone() } else { problem.energy_gradient(&path.nodes[i])? };
            let (tangent, back, ahead) = path.tangent(i)?;
            let across = g.axpy(-g.dot(&tangent)?, &tangent)?;
            let reach = 0.5 * back.min(ahead);
            if let Some((node, level, eta)) =
                armijo_move(problem, &path.nodes[i], path.levels[i], &across, steps[i], reach, config.armijo, min_step)?
            {
                path.nodes[i] = node;
                path.levels[i] = level;
                steps[i] = (eta / config.armijo.factor).min(MAX_STEP_RATIO * config.step0);
            }
        }
        trace.push(TraceRecord { iteration: sweeps, level: top_level, grad_norm: grad_supnorm, t_u: 1.0, step: steps[top] });
        sweeps += 1;
        let reequalized = sweeps % config.reequalize_every == 0;
        if reequalized {
            match climbing {
                Some(c) => {
                    path.reequalize(problem, 0, c)?;
                    path.reequalize(problem, c, count - 1)?;
                }
                None => path.reequalize(problem, 0, count - 1)?,
            }
        }
        path.locate_max();
        if reequalized && climbing.is_none() {
            if (path.max_level - settled).abs() <= SETTLE_TOLERANCE * path.max_level.abs() {
                climbing = Some(path.max_index);
                climb_from = Some(sweeps);
            }
            settled = path.max_level;
        }
    }

    let k = climbing.unwrap_or(path.max_index);
    let u = path.nodes[k].clone();
    let eval = problem.evaluate(&u, false)?;
    let level = eval.energy.total;
    Ok(Solution {
        algorithm: Algorithm::MountainPass,
        level,
        nehari_residual: eval.nehari_residual(),
        norm_p: eval.norm_p,
        grad_supnorm,
        grad_supnorm_raw: grad_raw,
        min_value: u.min_value(),
        iterations: sweeps,
        wall_time: started.elapsed().as_secs_f64(),
        converged,
        restarts: vec![RestartSummary {
            index: 0,
            init: config.init,
            seed: config.seed,
            level,
            grad_supnorm,
            iterations: sweeps,
            converged,
        }],
        level_spread: 0.0,
        projection_failures: 0,
        notes,
        trace,
        mountain_pass: Some(MountainPassInfo {
            endpoint_level,
            endpoint_norm,
            endpoint_scale: scale,
            initial_max_level,
            max_index: k,
            path_nodes: count,
            climb_from,
        }),
        u,
    })
}
