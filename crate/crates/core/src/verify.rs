//! Property suite: identities and inequalities the continuous theory
//! guarantees, sampled on the configured problem.
//!
//! Every property reports the worst margin over its cases (negative means
//! failed) and, on failure, the offending case with the seed that regenerates
//! it. Reports depend only on the problem, the configuration and the seed.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::functional::{NonlinearityKind, Problem, ProblemSpec};
use crate::lattice::{Field, LatticeBox};
use crate::operators::{
    hls_conjugate_exponent, hls_ratio, p_inequality_slack, sample_hls_pair, GreenConvolver, KernelOperator,
    KernelTable,
};
use crate::solver::FLOOR_SLACK;
use crate::spectral::{compute_green_table, default_quadrature_points};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    /// Random cases for the field-based properties.
    pub samples: usize,
    pub seed: u64,
    /// Radius of the small sphere `|u|_H = rho`.
    pub rho: f64,
    pub sphere_directions: usize,
    pub hls_pairs: usize,
    pub p_triples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { samples: 200, seed: 0, rho: 0.1, sphere_directions: 1000, hls_pairs: 1000, p_triples: 10_000 }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 10 {
            return Err(Error::validation("verify.samples must be at least 10"));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::validation("verify.rho must be positive"));
        }
        if self.sphere_directions == 0 || self.hls_pairs == 0 || self.p_triples == 0 {
            return Err(Error::validation("verify sample counts must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub anchor: String,
    pub passed: bool,
    pub cases: usize,
    /// Smallest slack over all cases; negative when the property failed.
    pub worst_margin: f64,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failing_case: Option<Value>,
}

/// Quantities the suite measures rather than checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Empirical {
    /// Smallest `|v|_H` over projected samples, per batch.
    pub nehari_floor: [f64; 2],
    /// Smallest `J` over the small sphere.
    pub sphere_level: f64,
    /// Largest sampled HLS ratio on the box and on the box grown by 4.
    pub hls_max: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub all_passed: bool,
    pub properties: Vec<PropertyResult>,
    pub empirical: Empirical,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed)
    }

    pub fn property(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }
}

struct Tracker {
    result: PropertyResult,
}

impl Tracker {
    fn new(name: &str, anchor: &str) -> Self {
        Self {
            result: PropertyResult {
                name: name.into(),
                anchor: anchor.into(),
                passed: true,
                cases: 0,
                worst_margin: f64::INFINITY,
                detail: String::new(),
                failing_case: None,
            },
        }
    }

    /// One case; `margin >= 0` passes. The case is serialized only for the
    /// worst failure.
    fn record(&mut self, margin: f64, case: impl FnOnce() -> Value) {
        let r = &mut self.result;
        r.cases += 1;
        let margin = if margin.is_nan() { f64::NEG_INFINITY } else { margin };
        if margin < r.worst_margin {
            r.worst_margin = margin;
            if margin < 0.0 {
                r.failing_case = Some(case());
            }
        }
        if margin < 0.0 {
            r.passed = false;
        }
    }

    fn finish(mut self, detail: impl Into<String>) -> PropertyResult {
        self.result.detail = detail.into();
        self.result
    }
}

/// Seed of case `i` of property `prop`.
pub fn case_seed(seed: u64, prop: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (prop << 40) ^ i as u64
}

/// Independent uniform values in `[-1, 1)`.
pub fn signed_field(lattice: LatticeBox, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_fn(lattice, |_| rng.random_range(-1.0..1.0))
}

/// Independent uniform values in `[0, 1)`.
pub fn nonnegative_field(lattice: LatticeBox, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_fn(lattice, |_| rng.random_range(0.0..1.0))
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// `sum phi (-Delta)_p u` and `sum |grad u|^(p-2) <grad u, grad phi>`.
pub fn integration_by_parts_sides(op: &KernelOperator, u: &Field, phi: &Field, p: f64) -> Result<(f64, f64)> {
    let lhs = op.p_laplacian(u, p)?.dot(phi)?;
    let weights = op.gradient_weights(u, p)?;
    let forms = op.gradient_forms(u, phi)?;
    let terms: Vec<f64> = weights.iter().zip(&forms).map(|(w, g)| w * g).collect();
    Ok((lhs, crate::numerics::pairwise_sum(&terms)))
}

/// Slacks of the sign decomposition checks for one field: exact sum and
/// product, nonnegative mixed forms, and the negative-part energy bound.
pub fn sign_decomposition_margin(op: &KernelOperator, u: &Field, p: f64) -> Result<(f64, Value)> {
    let plus = u.positive_part();
    let minus = u.negative_part();
    let sum_exact = plus.values().iter().zip(minus.values()).zip(u.values()).all(|((a, b), c)| a + b == *c);
    let product_zero = plus.values().iter().zip(minus.values()).all(|(a, b)| a * b == 0.0);
    let forms = op.gradient_forms(&plus, &minus)?;
    let scale = op.gradient_forms(u, u)?.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let worst_form = forms.iter().cloned().fold(f64::INFINITY, f64::min);
    let full = op.gradient_power_sum(u, p)?;
    let neg = op.gradient_power_sum(&minus, p)?;
    let mut margin = (worst_form / scale + 1e-12).min((full - neg) / full.max(f64::MIN_POSITIVE) + 1e-12);
    if !sum_exact || !product_zero {
        margin = -1.0;
    }
    let case = json!({
        "sum_exact": sum_exact,
        "product_zero": product_zero,
        "min_mixed_form": worst_form,
        "negative_part_energy": neg,
        "energy": full,
    });
    Ok((margin, case))
}

/// Largest relative gap `|C(t u) - t^theta C(u)|` for pure powers, or the
/// shortfall of `C(t u) >= t^theta C(u)` otherwise, over `ts`.
pub fn superlinearity_gap(problem: &Problem, u: &Field, ts: &[f64]) -> Result<f64> {
    let base = problem.choquard_energy(u)?;
    let theta = problem.theta();
    let exact = problem.nonlinearity().kind() == NonlinearityKind::PurePower;
    let mut worst = 0.0f64;
    for &t in ts {
        let scaled = problem.choquard_energy(&u.scaled(t))?;
        let target = t.powf(theta) * base;
        let gap = if exact { (scaled - target).abs() } else { (target - scaled).max(0.0) };
        worst = worst.max(gap / target.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Largest relative error of the gradient against central differences
/// with step `h`, over the listed sites. Each error is scaled by the
/// larger of the component and `1e-3` times the gradient sup-norm.
pub fn gradient_fd_error(problem: &Problem, u: &Field, sites: &[usize], h: f64) -> Result<f64> {
    let g = problem.energy_gradient(u)?;
    let floor = 1e-3 * g.sup_norm();
    let mut worst = 0.0f64;
    for &i in sites {
        let mut up = u.clone();
        up.values_mut()[i] += h;
        let mut down = u.clone();
        down.values_mut()[i] -= h;
        let fd = (problem.energy(&up)?.total - problem.energy(&down)?.total) / (2.0 * h);
        let gi = g.values()[i];
        worst = worst.max((gi - fd).abs() / gi.abs().max(floor).max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Runs every property. `spec` supplies the kernel model and `s` for the
/// small-box checks; everything else runs on `problem`.
pub fn run_properties(problem: &Problem, spec: &ProblemSpec, config: &VerifyConfig) -> Result<VerifyReport> {
    config.validate()?;
    let mut props = Vec::new();
    props.push(integration_by_parts(spec, config)?);
    props.push(sign_decomposition(problem, config)?);
    props.push(p_inequality(config));
    props.push(kernel_bounds(problem));
    props.push(green_table(problem));
    props.push(convolution_equivalence(problem, config)?);
    props.push(hypotheses(problem));
    props.push(gradient_check(problem, config)?);
    props.push(superlinearity(problem, config)?);
    let (projection, positivity, floor, eta) = nehari_properties(problem, config)?;
    props.extend([projection, positivity, floor]);
    props.push(psi_monotonicity(problem, config)?);
    let (sphere, sigma) = small_sphere(problem, config)?;
    props.push(sphere);
    props.push(ray_endpoint(problem, config)?);
    let (hls, hls_max) = hls(problem, spec, config)?;
    props.push(hls);

    let all_passed = props.iter().all(|p| p.passed);
    Ok(VerifyReport {
        seed: config.seed,
        samples: config.samples,
        all_passed,
        properties: props,
        empirical: Empirical { nehari_floor: eta, sphere_level: sigma, hls_max },
    })
}

fn integration_by_parts(spec: &ProblemSpec, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 1;
    let mut t = Tracker::new("integration_by_parts", "integration by parts for the fractional p-Laplacian");
    let mut ops: BTreeMap<(usize, usize), KernelOperator> = BTreeMap::new();
    let cases = config.samples / 2;
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 1 + i % 2;
        let p = [2.0, 3.0, 4.0][i % 3];
        let radius = rng.random_range(1..=6usize);
        let lattice = LatticeBox::new(d, radius)?;
        if !ops.contains_key(&(d, radius)) {
            let kernel = KernelTable::build(spec.kernel_model, spec.s, &lattice)?;
            ops.insert((d, radius), KernelOperator::new(lattice, kernel)?);
        }
        let op = &ops[&(d, radius)];
        let u = signed_field(lattice, rng.random());
        let phi = signed_field(lattice, rng.random());
        let (lhs, rhs) = integration_by_parts_sides(op, &u, &phi, p)?;
        let err = rel_diff(lhs, rhs);
        t.record(1e-10 - err, || json!({"case_seed": seed, "d": d, "L": radius, "p": p, "lhs": lhs, "rhs": rhs}));
    }
    Ok(t.finish(format!("{cases} random (u, phi) pairs, d in {{1, 2}}, p in {{2, 3, 4}}, L <= 6; relative tolerance 1e-10")))
}

fn sign_decomposition(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 2;
    let mut t = Tracker::new("sign_decomposition", "positive and negative parts of a field");
    let lattice = *problem.lattice();
    for i in 0..config.samples {
        let seed = case_seed(config.seed, ID, i);
        let u = signed_field(lattice, seed);
        let (margin, case) = sign_decomposition_margin(problem.operator(), &u, problem.p())?;
        t.record(margin, || json!({"case_seed": seed, "checks": case}));
    }
    Ok(t.finish(format!(
        "{} signed fields: u+ + u- = u and u+ u- = 0 exactly, mixed gradient forms >= 0 and sum |grad u-|^p <= sum |grad u|^p to 1e-12",
        config.samples
    )))
}

fn p_inequality(config: &VerifyConfig) -> PropertyResult {
    const ID: u64 = 3;
    let mut t = Tracker::new("p_inequality", "scalar monotonicity inequality for |t|^(p-2) t");
    let mut rng = ChaCha8Rng::seed_from_u64(case_seed(config.seed, ID, 0));
    for _ in 0..config.p_triples {
        let a: f64 = rng.random_range(-10.0..10.0);
        let b: f64 = rng.random_range(-10.0..10.0);
        let p: f64 = rng.random_range(2.0..=4.0);
        let slack = p_inequality_slack(a, b, p);
        let scale = (a - b).abs().powf(p).max(f64::MIN_POSITIVE);
        t.record(if slack >= 0.0 { slack / scale } else { slack }, || json!({"a": a, "b": b, "p": p, "slack": slack}));
    }
    t.finish(format!(
        "{} random (a, b, p), p in [2, 4]: |a-b|^p <= 2^(p-2) p (|a|^(p-2) a - |b|^(p-2) b)(a - b); margin is slack / |a-b|^p",
        config.p_triples
    ))
}

fn kernel_bounds(problem: &Problem) -> PropertyResult {
    let mut t = Tracker::new("kernel_bounds", "two-sided power-law bound on the jump kernel");
    let kernel = problem.operator().kernel();
    let violations = kernel.check_bounds();
    if violations.is_empty() {
        t.record(0.0, || Value::Null);
    } else {
        let v = &violations[0];
        t.record(-(violations.len() as f64), || {
            json!({"violations": violations.len(), "z": v.z, "value": v.value, "reason": v.reason})
        });
    }
    t.finish(format!(
        "{} kernel, s = {}: positivity, W(z) = W(-z), c_lo |z|^(-d-2s) <= W(z) <= c_hi |z|^(-d-2s) with c_lo = {:e}, c_hi = {:e}; margin is minus the violation count",
        kernel.model().name(),
        kernel.s(),
        kernel.c_lo(),
        kernel.c_hi()
    ))
}

fn green_table(problem: &Problem) -> PropertyResult {
    let mut t = Tracker::new("green_table", "positive symmetric Green's function of the fractional Laplacian");
    let table = problem.convolver().table();
    let values = table.values();
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let asym = (0..values.len()).map(|i| (values[i] - values[values.len() - 1 - i]).abs()).fold(0.0, f64::max);
    let tol = crate::spectral::DEFAULT_BUILD_TOLERANCE;
    let margin = if asym > 0.0 {
        -asym
    } else {
        ((tol - table.refinement_delta()) / tol).min(min / values[table.grid().center()])
    };
    t.record(margin, || json!({"min_value": min, "asymmetry": asym, "refinement_delta": table.refinement_delta()}));
    t.finish(format!(
        "d = {}, alpha = {}, N = {}: all entries positive, exactly symmetric, N vs 2N change {:e} <= {tol:e}",
        table.dim(),
        table.alpha(),
        table.quad_points(),
        table.refinement_delta()
    ))
}

fn convolution_equivalence(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 6;
    let mut t = Tracker::new("convolution_equivalence", "FFT and direct evaluation of the Riesz convolution");
    let cases = (config.samples / 10).max(1);
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let g = nonnegative_field(*problem.lattice(), seed);
        let disc = problem.convolver().method_discrepancy(&g)?;
        t.record(1e-10 - disc, || json!({"case_seed": seed, "discrepancy": disc}));
    }
    Ok(t.finish(format!("{cases} random nonnegative fields: max |fft - direct| <= 1e-10 max |direct|")))
}

fn hypotheses(problem: &Problem) -> PropertyResult {
    let mut t = Tracker::new("hypotheses", "growth hypotheses (f1)-(f4) and potential hypotheses (h1)-(h2)");
    let report = problem.nonlinearity().check_hypotheses();
    let potential = problem.potential().check_hypotheses();
    let ok = report.all_passed() && potential.is_ok();
    t.record(if ok { 0.0 } else { -1.0 }, || {
        json!({
            "f1": report.f1.detail, "f2": report.f2.detail, "f3": report.f3.detail, "f4": report.f4.detail,
            "potential": potential.as_ref().err().map(|e| e.to_string()),
        })
    });
    t.finish(format!(
        "sampled checks; (f4) on sampled rays only; growth constants {}",
        report
            .growth
            .iter()
            .map(|g| format!("C({}) = {:e} (fitted)", g.eps, g.c_eps))
            .collect::<Vec<_>>()
            .join(", ")
    ))
}

fn gradient_check(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 8;
    let mut t = Tracker::new("energy_gradient", "derivative of the modified energy");
    let tol = if problem.p() == 2.0 { 1e-6 } else { 1e-5 };
    let lattice = *problem.lattice();
    let cases = (config.samples / 10).clamp(1, 20);
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = nonnegative_field(lattice, rng.random()).map(|v| v + 0.5);
        // Central differences lose about eps |J| / h to cancellation, so only
        // components well above that are compared relatively.
        let g = problem.energy_gradient(&u)?;
        let cut = 0.05 * g.sup_norm();
        let mut sites = Vec::new();
        for _ in 0..1000 {
            let i = rng.random_range(0..lattice.len());
            if g.values()[i].abs() >= cut {
                sites.push(i);
                if sites.len() == 8 {
                    break;
                }
            }
        }
        let err = gradient_fd_error(problem, &u, &sites, 1e-5)?;
        t.record(tol - err, || json!({"case_seed": seed, "sites": sites, "error": err}));
    }
    Ok(t.finish(format!(
        "{cases} random fields with values in [0.5, 1.5), away from the kink of F at 0; 8 sites each with |g_i| >= 0.05 sup |g|, central differences with step 1e-5; relative tolerance {tol:e}"
    )))
}

fn superlinearity(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 9;
    let mut t = Tracker::new("superlinearity", "scaling of the Choquard term along rays");
    let cases = (config.samples / 10).max(1);
    let ts = [1.0, 1.5, 2.0, 4.0];
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let u = nonnegative_field(*problem.lattice(), seed);
        let gap = superlinearity_gap(problem, &u, &ts)?;
        t.record(1e-10 - gap, || json!({"case_seed": seed, "relative_gap": gap}));
    }
    Ok(t.finish(format!(
        "{cases} random u >= 0, t in {{1, 1.5, 2, 4}}: C(t u) vs t^theta C(u) with theta = {}; relative tolerance 1e-10",
        problem.theta()
    )))
}

/// Projection, on-manifold positivity, and the empirical Nehari floor share
/// their projected samples.
fn nehari_properties(
    problem: &Problem,
    config: &VerifyConfig,
) -> Result<(PropertyResult, PropertyResult, PropertyResult, [f64; 2])> {
    const ID: u64 = 10;
    let lattice = *problem.lattice();
    let pure = problem.nonlinearity().kind() == NonlinearityKind::PurePower;
    let p = problem.p();
    let theta = problem.theta();
    let mut proj = Tracker::new("nehari_projection", "unique Nehari scaling on each ray");
    let mut pos = Tracker::new("manifold_energy_positivity", "energy on the Nehari manifold is bounded below");
    let mut floor = Tracker::new("nehari_floor", "Nehari manifold stays away from zero");
    let rays = (config.samples / 4).max(2);
    let mut eta = [f64::INFINITY; 2];
    for batch in 0..2 {
        for i in 0..rays {
            let seed = case_seed(config.seed, ID + batch as u64, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = nonnegative_field(lattice, rng.random());
            let pr = problem.nehari_project(&u)?;
            let ev = problem.evaluate(&pr.v, false)?;
            eta[batch] = eta[batch].min(ev.norm_p.powf(1.0 / p));
            if batch == 1 {
                continue;
            }
            let mut margin = 1e-10 - ev.nehari_residual().abs() / ev.norm_p;
            let mut agreement = 0.0;
            if pure {
                let b = problem.nehari_project_bisection(&u)?;
                agreement = rel_diff(pr.t, b.t);
                margin = margin.min(1e-8 - agreement);
            }
            let again = problem.nehari_project(&pr.v)?;
            margin = margin.min(1e-10 - (again.t - 1.0).abs());
            let c: f64 = rng.random_range(0.1..10.0);
            let scaled = problem.nehari_project(&u.scaled(c))?;
            let scaling = rel_diff(scaled.t, pr.t / c);
            margin = margin.min(1e-10 - scaling);
            proj.record(margin, || {
                json!({"case_seed": seed, "t": pr.t, "bisection_gap": agreement, "reprojection_t": again.t,
                       "c": c, "scaling_gap": scaling, "residual": ev.nehari_residual()})
            });
            let lower = (1.0 / p - 1.0 / theta) * ev.norm_p;
            let margin = ((ev.energy.total - lower) / ev.norm_p + FLOOR_SLACK).min(lower);
            pos.record(margin, || json!({"case_seed": seed, "level": ev.energy.total, "floor": lower}));
        }
    }
    let ratio = eta[0] / eta[1];
    floor.record((eta[0].min(eta[1]) > 0.0) as u8 as f64 * (0.2 - (ratio - 1.0).abs()) - (eta[0].min(eta[1]) <= 0.0) as u8 as f64, || {
        json!({"eta": eta})
    });
    Ok((
        proj.finish(format!(
            "{rays} random rays: residual <= 1e-10 |v|^p, closed form vs bisection <= 1e-8, t = 1 on the manifold and t(c u) = t(u)/c to 1e-10"
        )),
        pos.finish(format!("{rays} projected points: J(v) >= (1/p - 1/theta) |v|_H^p > 0")),
        floor.finish(format!(
            "min |v|_H over two batches of {rays} projected rays: {:e} and {:e}; both positive and within 20% of each other",
            eta[0], eta[1]
        )),
        eta,
    ))
}

fn psi_monotonicity(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 12;
    let mut t = Tracker::new("psi_monotonicity", "strict monotonicity of the Nehari ray map");
    let rays = (config.samples / 4).max(1);
    let p = problem.p();
    for i in 0..rays {
        let seed = case_seed(config.seed, ID, i);
        let u = signed_field(*problem.lattice(), seed).map(|v| v + 0.25);
        let tu = problem.nehari_project(&u)?.t;
        let mut prev = f64::NEG_INFINITY;
        let mut worst = f64::INFINITY;
        for k in 0..=40 {
            let s = tu * 10f64.powf(-1.0 + k as f64 / 20.0);
            let q = problem.choquard_pairing(&u.scaled(s))? / s.powf(p);
            if prev.is_finite() {
                worst = worst.min((q - prev) / q.abs().max(f64::MIN_POSITIVE));
            }
            prev = q;
        }
        t.record(worst, || json!({"case_seed": seed, "t_u": tu, "min_relative_increment": worst}));
    }
    Ok(t.finish(format!(
        "{rays} random rays: A(t u) / t^p strictly increasing on 41 points in [0.1, 10] t_u (sampled, not a proof)"
    )))
}

fn small_sphere(problem: &Problem, config: &VerifyConfig) -> Result<(PropertyResult, f64)> {
    const ID: u64 = 13;
    let mut t = Tracker::new("small_sphere_positivity", "mountain-pass geometry near zero");
    let p = problem.p();
    let mut sigma = f64::INFINITY;
    for i in 0..config.sphere_directions {
        let seed = case_seed(config.seed, ID, i);
        let w = if i % 2 == 0 {
            nonnegative_field(*problem.lattice(), seed)
        } else {
            signed_field(*problem.lattice(), seed)
        };
        let norm = problem.norm_p(&w)?.powf(1.0 / p);
        let u = w.scaled(config.rho / norm);
        let level = problem.energy(&u)?.total;
        sigma = sigma.min(level);
        t.record(level, || json!({"case_seed": seed, "level": level}));
    }
    let result = t.finish(format!(
        "{} directions on |u|_H = {}: J > 0; smallest level {sigma:e}",
        config.sphere_directions, config.rho
    ));
    Ok((result, sigma))
}

fn ray_endpoint(problem: &Problem, config: &VerifyConfig) -> Result<PropertyResult> {
    const ID: u64 = 14;
    let mut t = Tracker::new("ray_endpoint", "negative energy far out along positive rays");
    let cases = (config.samples / 10).max(1);
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let u = nonnegative_field(*problem.lattice(), seed);
        let mut scale = 2.0f64;
        let found = loop {
            let e = u.scaled(scale);
            if problem.energy(&e)?.total < 0.0 {
                break Some(problem.norm_p(&e)?.powf(1.0 / problem.p()));
            }
            scale *= 2.0;
            if scale > 1_152_921_504_606_846_976.0 {
                break None;
            }
        };
        let margin = found.map_or(-1.0, |norm| norm - config.rho);
        t.record(margin, || json!({"case_seed": seed, "endpoint_norm": found, "scale": scale}));
    }
    Ok(t.finish(format!(
        "{cases} random u >= 0: the first t in {{2, 4, 8, ...}} <= 2^60 with J(t u) < 0 exists and |t u|_H > rho"
    )))
}

fn hls(problem: &Problem, spec: &ProblemSpec, config: &VerifyConfig) -> Result<(PropertyResult, [f64; 2])> {
    const ID: u64 = 15;
    let mut t = Tracker::new("hls_ratio", "discrete Hardy-Littlewood-Sobolev inequality");
    let conv = problem.convolver();
    let lattice = *problem.lattice();
    let d = lattice.dim();
    let r = hls_conjugate_exponent(d, spec.alpha);

    let origin = Field::delta(lattice, &vec![0; d])?;
    let single = hls_ratio(conv, &origin, &origin, r, r)?;
    let r0 = conv.table().value(&vec![0; d]).expect("origin entry");
    t.record(1e-12 - rel_diff(single, r0), || json!({"unit_mass_ratio": single, "R0": r0}));

    let cases = (config.samples / 10).max(1);
    for i in 0..cases {
        let seed = case_seed(config.seed, ID, i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = nonnegative_field(lattice, rng.random());
        let v = nonnegative_field(lattice, rng.random());
        let (a, b): (f64, f64) = (rng.random_range(0.01..100.0), rng.random_range(0.01..100.0));
        let q = hls_ratio(conv, &u, &v, r, r)?;
        let qs = hls_ratio(conv, &u.scaled(a), &v.scaled(b), r, r)?;
        t.record(1e-10 - rel_diff(q, qs), || json!({"case_seed": seed, "a": a, "b": b, "ratio": q, "scaled": qs}));
    }

    let seed = case_seed(config.seed, ID, usize::MAX >> 24);
    let here = sample_hls_pair(conv, config.hls_pairs, seed)?;
    let grown = lattice.radius() + 4;
    let n = default_quadrature_points(d).max(4 * grown + 2);
    let big = LatticeBox::new(d, grown)?;
    let big_conv = GreenConvolver::new(big, compute_green_table(d, spec.alpha, grown, n + n % 2)?)?;
    let there = sample_hls_pair(&big_conv, config.hls_pairs, seed)?;
    let drift = rel_diff(here.max_ratio, there.max_ratio);
    t.record(0.05 - drift, || json!({"max_ratio": here.max_ratio, "max_ratio_grown": there.max_ratio}));
    let result = t.finish(format!(
        "r = t = {r}: unit mass gives R(0), scaling invariance to 1e-10 on {cases} pairs, Monte-Carlo max over {} bump pairs {:.6} on L = {} and {:.6} on L = {grown} (within 5%)",
        config.hls_pairs,
        here.max_ratio,
        lattice.radius(),
        there.max_ratio
    ));
    Ok((result, [here.max_ratio, there.max_ratio]))
}
