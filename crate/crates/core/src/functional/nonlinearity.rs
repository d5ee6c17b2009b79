use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonlinearityKind {
    PurePower,
    Custom,
}

/// The source term `f` with primitive `F`, exponents `tau`, `theta` and the
/// p of the operator. Both evaluators vanish for `t <= 0`.
#[derive(Clone)]
pub struct Nonlinearity {
    kind: NonlinearityKind,
    tau: f64,
    theta: f64,
    p: f64,
    f: ScalarFn,
    big_f: ScalarFn,
}

impl fmt::Debug for Nonlinearity {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        out.debug_struct("Nonlinearity")
            .field("kind", &self.kind)
            .field("tau", &self.tau)
            .field("theta", &self.theta)
            .field("p", &self.p)
            .finish_non_exhaustive()
    }
}

/// `(d + alpha) p / (2d)`, the lower bound on `tau`.
pub fn tau_threshold(dim: usize, alpha: f64, p: f64) -> f64 {
    (dim as f64 + alpha) * p / (2.0 * dim as f64)
}

fn check_tau(tau: f64, p: f64, dim: usize, alpha: f64) -> Result<()> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::validation(format!("p = {p} must satisfy p >= 2")));
    }
    let bound = tau_threshold(dim, alpha, p);
    if !(tau > bound && tau.is_finite()) {
        return Err(Error::validation(format!(
            "hypothesis (f2) needs tau > (d + alpha) p / (2d) = {bound}, got tau = {tau}"
        )));
    }
    Ok(())
}

impl Nonlinearity {
    /// `f(t) = t^(tau-1)`, `F(t) = t^tau / tau` for `t > 0`, with `theta = 2 tau`.
    pub fn power(tau: f64, p: f64, dim: usize, alpha: f64) -> Result<Self> {
        check_tau(tau, p, dim, alpha)?;
        Ok(Self {
            kind: NonlinearityKind::PurePower,
            tau,
            theta: 2.0 * tau,
            p,
            f: Arc::new(move |t| if t > 0.0 { t.powf(tau - 1.0) } else { 0.0 }),
            big_f: Arc::new(move |t| if t > 0.0 { t.powf(tau) / tau } else { 0.0 }),
        })
    }

    /// A user nonlinearity. `f` and `big_f` are only consulted for `t > 0`.
    /// The sampled hypothesis checks run here; failures come back as
    /// warnings in the report rather than as errors.
    #[allow(clippy::too_many_arguments)]
    pub fn custom(
        tau: f64,
        theta: f64,
        p: f64,
        dim: usize,
        alpha: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        big_f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<(Self, HypothesisReport)> {
        check_tau(tau, p, dim, alpha)?;
        if !(theta > p && theta <= 2.0 * tau) {
            return Err(Error::validation(format!(
                "theta = {theta} must lie in (p, 2 tau] = ({p}, {}]",
                2.0 * tau
            )));
        }
        let nl = Self {
            kind: NonlinearityKind::Custom,
            tau,
            theta,
            p,
            f: Arc::new(move |t| if t > 0.0 { f(t) } else { 0.0 }),
            big_f: Arc::new(move |t| if t > 0.0 { big_f(t) } else { 0.0 }),
        };
        let report = nl.check_hypotheses();
        Ok((nl, report))
    }

    pub fn kind(&self) -> NonlinearityKind {
        self.kind
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    /// The primitive `F(t) = int_0^t f`.
    #[inline]
    pub fn big_f(&self, t: f64) -> f64 {
        (self.big_f)(t)
    }

    /// Sampled checks of (f1)-(f3) and, for pure powers, (f4) by its closed
    /// form. These are necessary-condition samples, never proofs.
    pub fn check_hypotheses(&self) -> HypothesisReport {
        let p = self.p;
        // (f1): f(t) / t^(p-1) on t = 1e-1 .. 1e-6 should shrink.
        let ratios: Vec<f64> = (1..=6).map(|k| {
            let t = 10f64.powi(-k);
            self.f(t) / t.powf(p - 1.0)
        }).collect();
        let f1 = ratios.windows(2).all(|w| w[1] <= w[0]) && ratios[5] < ratios[0].max(f64::MIN_POSITIVE);
        let f1 = HypothesisCheck {
            passed: f1 || ratios.iter().all(|&r| r == 0.0),
            detail: format!("f(t)/t^(p-1) from {:e} (t=1e-1) to {:e} (t=1e-6)", ratios[0], ratios[5]),
        };

        let grid = sample_grid();
        let c2 = grid
            .iter()
            .map(|&t| self.f(t) / (1.0 + t.powf(self.tau - 1.0)))
            .fold(0.0f64, f64::max);
        let f2 = HypothesisCheck {
            passed: c2.is_finite(),
            detail: format!("f(t) <= C (1 + t^(tau-1)) with fitted C = {c2:e}"),
        };

        let mut worst = f64::INFINITY;
        for &t in &grid {
            let lhs = self.theta * self.big_f(t);
            let rhs = 2.0 * self.f(t) * t;
            let scale = rhs.abs().max(f64::MIN_POSITIVE);
            worst = worst.min((lhs.min(rhs - lhs + 1e-12 * scale)) / scale);
        }
        let f3 = HypothesisCheck {
            passed: worst >= 0.0,
            detail: format!("min over samples of the (f3) margin = {worst:e}"),
        };

        let f4 = match self.kind {
            NonlinearityKind::PurePower => HypothesisCheck {
                passed: 2.0 * self.tau > p,
                detail: format!("A(tu)/t^p = t^(2 tau - p) A(u) with 2 tau - p = {}", 2.0 * self.tau - p),
            },
            NonlinearityKind::Custom => HypothesisCheck {
                passed: true,
                detail: "checked on sampled rays by the verification suite".into(),
            },
        };
        HypothesisReport {
            f1,
            f2,
            f3,
            f4,
            growth: [0.1, 0.01].map(|eps| GrowthConstant { eps, c_eps: self.growth_constant(eps) }),
        }
    }

    /// Fitted `C_eps` with `f(t) <= eps t^(p-1) + C_eps t^(tau-1)` on
    /// `t in [1e-6, 1e3]`.
    pub fn growth_constant(&self, eps: f64) -> f64 {
        sample_grid()
            .iter()
            .map(|&t| (self.f(t) - eps * t.powf(self.p - 1.0)) / t.powf(self.tau - 1.0))
            .fold(0.0f64, f64::max)
    }
}

/// Geometric grid on `[1e-6, 1e3]`, 10 points per decade.
fn sample_grid() -> Vec<f64> {
    (0..=90).map(|k| 10f64.powf(-6.0 + k as f64 / 10.0)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthConstant {
    pub eps: f64,
    pub c_eps: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub f1: HypothesisCheck,
    pub f2: HypothesisCheck,
    pub f3: HypothesisCheck,
    pub f4: HypothesisCheck,
    pub growth: [GrowthConstant; 2],
}

impl HypothesisReport {
    pub fn all_passed(&self) -> bool {
        self.f1.passed && self.f2.passed && self.f3.passed && self.f4.passed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_examples() {
        assert_eq!(tau_threshold(2, 1.0, 2.0), 1.5);
        assert!(Nonlinearity::power(2.5, 2.0, 2, 1.0).is_ok());
        let err = Nonlinearity::power(1.4, 2.0, 2, 1.0).unwrap_err();
        assert!(err.to_string().contains("(f2)"));
    }

    #[test]
    fn power_values() {
        let nl = Nonlinearity::power(3.0, 2.0, 1, 0.5).unwrap();
        assert_eq!(nl.f(1.0), 1.0);
        assert!((nl.big_f(1.0) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(nl.f(-2.0), 0.0);
        assert_eq!(nl.big_f(0.0), 0.0);
        for t in [0.3, 1.7, 9.0] {
            let lhs = nl.theta() * nl.big_f(t);
            assert!((lhs - 2.0 * nl.f(t) * t).abs() < 1e-12 * lhs);
        }
        assert!(nl.check_hypotheses().all_passed());
    }

    #[test]
    fn custom_failures_are_warnings() {
        // f(t) = t fails (f1) for p = 2 and (f3) for theta = 4.5.
        let (nl, report) =
            Nonlinearity::custom(2.5, 4.5, 2.0, 1, 0.5, |t| t, |t| t * t / 2.0).unwrap();
        assert_eq!(nl.kind(), NonlinearityKind::Custom);
        assert!(!report.f1.passed);
        assert!(!report.f3.passed);
        assert!(!report.all_passed());
    }

    #[test]
    fn growth_constant_of_power() {
        let nl = Nonlinearity::power(2.5, 2.0, 1, 0.5).unwrap();
        let c = nl.growth_constant(0.1);
        assert!(c > 0.0 && c <= 1.0);
    }
}
