use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Field;

use super::nonlinearity::NonlinearityKind;
use super::problem::Problem;

/// Growth limit of the bracket search, `2^60`.
const BRACKET_LIMIT: f64 = 1_152_921_504_606_846_976.0;
/// Relative bracket width at which bisection stops.
const BISECTION_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjectionMethod {
    ClosedForm,
    Bisection,
}

/// The Nehari point `v = t u` on the ray through `u`.
#[derive(Debug, Clone)]
pub struct Projection {
    pub t: f64,
    pub v: Field,
    pub method: ProjectionMethod,
    /// Convolutions spent finding `t`.
    pub evaluations: usize,
}

impl Problem {
    /// `|u|_H^p - A(u)`; zero exactly on the Nehari manifold.
    pub fn nehari_residual(&self, u: &Field) -> Result<f64> {
        if u.is_zero() {
            return Err(Error::validation("the Nehari residual is not defined at u = 0"));
        }
        Ok(self.evaluate(u, false)?.nehari_residual())
    }

    /// `psi(t) = |u|_H^p - A(t u) / t^p`, strictly decreasing in `t` under (f4).
    pub fn nehari_psi(&self, u: &Field, t: f64) -> Result<f64> {
        let norm = self.norm_p(u)?;
        Ok(norm - self.choquard_pairing(&u.scaled(t))? / t.powf(self.p()))
    }

    /// The unique `t_u > 0` with `t_u u` on the Nehari manifold. Pure powers
    /// use the closed form, everything else bisection.
    pub fn nehari_project(&self, u: &Field) -> Result<Projection> {
        match self.nonlinearity().kind() {
            NonlinearityKind::PurePower => self.nehari_project_closed_form(u),
            NonlinearityKind::Custom => self.nehari_project_bisection(u),
        }
    }

    /// `t_u = (|u|_H^p / A(u))^(1 / (2 tau - p))`, pure powers only.
    pub fn nehari_project_closed_form(&self, u: &Field) -> Result<Projection> {
        if self.nonlinearity().kind() != NonlinearityKind::PurePower {
            return Err(Error::validation("the closed-form projection needs a pure-power nonlinearity"));
        }
        self.check(u)?;
        if u.positive_part().is_zero() {
            return Err(Error::NoProjection);
        }
        let ev = self.evaluate(u, false)?;
        if !(ev.pairing > 0.0) {
            return Err(Error::NoProjection);
        }
        let exponent = 1.0 / (2.0 * self.nonlinearity().tau() - self.p());
        let t = (ev.norm_p / ev.pairing).powf(exponent);
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Divergence("closed-form Nehari scaling".into()));
        }
        Ok(Projection { t, v: u.scaled(t), method: ProjectionMethod::ClosedForm, evaluations: 1 })
    }

    /// Bracketing bisection on `psi`; the bracket grows by factors of 2.
    pub fn nehari_project_bisection(&self, u: &Field) -> Result<Projection> {
        self.check(u)?;
        if u.positive_part().is_zero() {
            return Err(Error::NoProjection);
        }
        let p = self.p();
        let norm = self.norm_p(u)?;
        let mut evaluations = 0;
        let mut psi = |t: f64| -> Result<f64> {
            evaluations += 1;
            Ok(norm - self.choquard_pairing(&u.scaled(t))? / t.powf(p))
        };
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        if psi(1.0)? > 0.0 {
            loop {
                hi *= 2.0;
                if hi > BRACKET_LIMIT {
                    return Err(Error::Divergence("Nehari bracket expansion".into()));
                }
                if psi(hi)? <= 0.0 {
                    lo = hi / 2.0;
                    break;
                }
            }
        } else {
            loop {
                lo /= 2.0;
                if lo < 1.0 / BRACKET_LIMIT {
                    return Err(Error::Divergence("Nehari bracket contraction".into()));
                }
                if psi(lo)? > 0.0 {
                    hi = lo * 2.0;
                    break;
                }
            }
        }
        while hi - lo > BISECTION_WIDTH * 0.5 * (lo + hi) {
            let mid = 0.5 * (lo + hi);
            if psi(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let t = 0.5 * (lo + hi);
        Ok(Projection { t, v: u.scaled(t), method: ProjectionMethod::Bisection, evaluations })
    }
}

#[cfg(test)]
mod tests {
    use crate::error::Error;
    use crate::functional::ProblemSpec;
    use crate::lattice::Field;

    #[test]
    fn closed_form_and_bisection_agree() {
        let problem = ProblemSpec::new(1, 4, 0.5, 2.0, 0.5, 2.5).build().unwrap();
        let u = Field::from_fn(*problem.lattice(), |x| (-(x[0] * x[0]) as f64 / 4.0).exp());
        let a = problem.nehari_project_closed_form(&u).unwrap();
        let b = problem.nehari_project_bisection(&u).unwrap();
        assert!((a.t - b.t).abs() < 1e-10 * a.t, "{} vs {}", a.t, b.t);
        let r = problem.nehari_residual(&a.v).unwrap();
        assert!(r.abs() < 1e-10 * problem.norm_p(&a.v).unwrap());
        let again = problem.nehari_project(&a.v).unwrap();
        assert!((again.t - 1.0).abs() < 1e-10);
    }

    #[test]
    fn degenerate_rays() {
        let problem = ProblemSpec::new(1, 3, 0.5, 2.0, 0.5, 2.5).build().unwrap();
        let b = *problem.lattice();
        let neg = Field::from_fn(b, |_| -1.0);
        assert!(matches!(problem.nehari_project(&neg), Err(Error::NoProjection)));
        assert!(matches!(problem.nehari_project_bisection(&neg), Err(Error::NoProjection)));
        assert!(matches!(problem.nehari_residual(&Field::zeros(b)), Err(Error::Validation(_))));
        let r = problem.nehari_residual(&neg).unwrap();
        assert!((r - problem.norm_p(&neg).unwrap()).abs() < 1e-14 * r);
    }
}
