use serde::Serialize;

use crate::error::Result;
use crate::functional::Problem;
use crate::lattice::Field;

use super::{scaled_supnorm, Solution};

/// For pure powers with `theta = 2 tau` the floor is attained exactly on the
/// manifold, so the comparison needs rounding slack.
pub const FLOOR_SLACK: f64 = 1e-12;

/// Pointwise checks on a candidate solution. Nothing here errors; every
/// finding is a field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    /// Set when the input is not a candidate at all (the zero field).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub declined: Option<String>,
    /// Set when `u` has a site with `u <= 0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rejected: Option<String>,
    /// `sup_x |r(x)|` with `r` the equation residual.
    pub residual_sup: f64,
    /// `residual_sup / max(1, |u|_inf^(p-1))`.
    pub residual_relative: f64,
    pub min_value: f64,
    pub nonpositive_sites: usize,
    pub strictly_positive: bool,
    pub level: f64,
    pub norm_p: f64,
    pub nehari_residual: f64,
    /// `(1/p - 1/theta) |u|_H^p`.
    pub level_floor: f64,
    /// `J - floor - 1/2 sum (R * F)(2 f u / theta - F)`.
    pub identity_defect: f64,
    /// What the algebra predicts for the defect: `nehari_residual / theta`.
    pub identity_expected: f64,
}

impl CertificateReport {
    fn declined(reason: &str) -> Self {
        Self {
            declined: Some(reason.into()),
            rejected: None,
            residual_sup: 0.0,
            residual_relative: 0.0,
            min_value: 0.0,
            nonpositive_sites: 0,
            strictly_positive: false,
            level: 0.0,
            norm_p: 0.0,
            nehari_residual: 0.0,
            level_floor: 0.0,
            identity_defect: 0.0,
            identity_expected: 0.0,
        }
    }

    /// `|defect - expected|` relative to `|u|_H^p`.
    pub fn identity_gap(&self) -> f64 {
        (self.identity_defect - self.identity_expected).abs() / self.norm_p.max(f64::MIN_POSITIVE)
    }

    /// Acceptance for a run with stopping tolerance `tol_grad`.
    pub fn passes(&self, tol_grad: f64) -> bool {
        self.declined.is_none()
            && self.strictly_positive
            && self.residual_relative <= 10.0 * tol_grad
            && self.nehari_residual.abs() <= 1e-8 * self.norm_p
            && self.level > 0.0
            && self.level >= self.level_floor - FLOOR_SLACK * self.norm_p
            && self.identity_gap() <= 1e-10
    }
}

pub fn certify_solution(sol: &Solution, problem: &Problem) -> Result<CertificateReport> {
    certify_field(problem, &sol.u)
}

pub fn certify_field(problem: &Problem, u: &Field) -> Result<CertificateReport> {
    if u.is_zero() {
        return Ok(CertificateReport::declined("trivial solution"));
    }
    let p = problem.p();
    let theta = problem.theta();
    let nl = problem.nonlinearity();
    let eval = problem.evaluate(u, true)?;
    let r = eval.gradient.as_ref().expect("gradient requested");
    let nonpositive_sites = u.values().iter().filter(|&&v| v <= 0.0).count();
    let strictly_positive = nonpositive_sites == 0;

    let conv = problem.choquard_potential(u)?;
    let (c, uv) = (conv.values(), u.values());
    let tail = 0.5
        * problem.sum(|i| {
            let v = uv[i].max(0.0);
            c[i] * (2.0 * nl.f(v) * v / theta - nl.big_f(v))
        });
    let level = eval.energy.total;
    let level_floor = (1.0 / p - 1.0 / theta) * eval.norm_p;
    Ok(CertificateReport {
        declined: None,
        rejected: (!strictly_positive)
            .then(|| format!("not strictly positive: {nonpositive_sites} sites with u <= 0")),
        residual_sup: r.sup_norm(),
        residual_relative: scaled_supnorm(r, u, p),
        min_value: u.min_value(),
        nonpositive_sites,
        strictly_positive,
        level,
        norm_p: eval.norm_p,
        nehari_residual: eval.nehari_residual(),
        level_floor,
        identity_defect: level - level_floor - tail,
        identity_expected: eval.nehari_residual() / theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functional::ProblemSpec;
    use crate::solver::{solve_ground_state, SolverConfig};

    #[test]
    fn converged_run_certifies() {
        let problem = ProblemSpec::new(1, 4, 0.5, 2.0, 0.5, 2.5).build().unwrap();
        let sol = solve_ground_state(&SolverConfig::default(), &problem).unwrap();
        let cert = certify_solution(&sol, &problem).unwrap();
        assert!(cert.passes(1e-6), "{cert:?}");
        assert!(cert.identity_gap() < 1e-12);
    }

    #[test]
    fn zero_site_and_zero_field() {
        let problem = ProblemSpec::new(1, 3, 0.5, 2.0, 0.5, 2.5).build().unwrap();
        let b = *problem.lattice();
        let cert = certify_field(&problem, &Field::zeros(b)).unwrap();
        assert_eq!(cert.declined.as_deref(), Some("trivial solution"));
        assert!(!cert.passes(1.0));
        let u = Field::from_fn(b, |x| if x[0] == 2 { 0.0 } else { 1.0 });
        let cert = certify_field(&problem, &u).unwrap();
        assert!(!cert.strictly_positive);
        assert_eq!(cert.nonpositive_sites, 1);
        assert!(cert.rejected.as_ref().unwrap().contains("not strictly positive"));
        // The identity holds off the manifold too, with defect N(u) / theta.
        assert!(cert.identity_gap() < 1e-12);
    }
}
