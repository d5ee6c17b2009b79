//! Gamma-function helpers for the lattice-sum corrections.

use statrs::function::gamma::gamma;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_TERMS: usize = 2000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `1 / Gamma(x)`, zero at the poles `x = 0, -1, -2, ...`.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Scaled upper incomplete gamma `Gamma(a, x) * x^(-a)` for any real `a` and `x > 0`.
pub fn upper_gamma_scaled(a: f64, x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x >= (a + 1.0).max(1.5) {
        return continued_fraction_scaled(a, x);
    }
    if a > 0.0 {
        gamma(a) * x.powf(-a) - lower_gamma_scaled(a, x)
    } else {
        // Walk down from an order in (0, 1] (or from E1 at a = 0) with
        // Gamma(b, x) = (Gamma(b + 1, x) - x^b e^-x) / b.
        let (mut order, mut value) = if a == a.round() {
            (0.0, exp_integral_e1(x))
        } else {
            let top = a + (-a).floor() + 1.0;
            (top, gamma(top) - lower_gamma_scaled(top, x) * x.powf(top))
        };
        while order > a + 0.5 {
            order -= 1.0;
            value = (value - x.powf(order) * (-x).exp()) / order;
        }
        value * x.powf(-a)
    }
}

/// Scaled lower incomplete gamma `gamma(a, x) * x^(-a)` for `a > 0`, `x >= 0`.
///
/// Equals `1/a` at `x = 0` and is smooth in `x`.
pub fn lower_gamma_scaled(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    let mut term = 1.0 / a;
    let mut sum = term;
    for n in 1..MAX_TERMS {
        term *= x / (a + n as f64);
        sum += term;
        if term.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum * (-x).exp()
}

/// Modified Lentz evaluation of the Legendre continued fraction, times `e^-x`.
fn continued_fraction_scaled(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    (-x).exp() * h
}

/// Exponential integral `E1(x) = Gamma(0, x)` for `x > 0`.
fn exp_integral_e1(x: f64) -> f64 {
    if x >= 1.5 {
        return continued_fraction_scaled(0.0, x);
    }
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 1..MAX_TERMS {
        term *= -x / n as f64;
        let add = term / n as f64;
        sum += add;
        if add.abs() < EPS * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn recip_gamma_poles() {
        assert_eq!(recip_gamma(0.0), 0.0);
        assert_eq!(recip_gamma(-1.0), 0.0);
        assert!(close(recip_gamma(0.5), 1.0 / std::f64::consts::PI.sqrt(), 1e-13));
        // Gamma(-1/2) = -2 sqrt(pi)
        assert!(close(recip_gamma(-0.5), -0.5 / std::f64::consts::PI.sqrt(), 1e-12));
    }

    #[test]
    fn upper_gamma_known_values() {
        // Gamma(1, x) = e^-x
        for x in [0.2, 0.9, 1.7, 5.0] {
            assert!(close(upper_gamma_scaled(1.0, x) * x, (-x as f64).exp(), 1e-13), "x={x}");
        }
        // Reference values of Gamma(a, x) to 16 digits.
        for (a, x, expect) in [
            (0.5, 0.7, 0.419_581_604_377_174_2),
            (0.5, 3.0, 0.025_356_509_323_463_44),
            (-0.5, 0.6, 0.448_125_428_747_721_6),
            (-0.5, 0.9, 0.220_059_894_325_061_7),
            (-0.5, 2.5, 0.013_976_317_753_307_06),
        ] {
            let got = upper_gamma_scaled(a, x) * x.powf(a);
            assert!(close(got, expect, 1e-13), "a={a} x={x}: {got}");
        }
        // Gamma(-1, x) = e^-x / x - E1(x); E1(1) = 0.21938393439552...
        let e1 = 0.219_383_934_395_520_3;
        assert!(close(exp_integral_e1(1.0), e1, 1e-13));
        assert!(close(upper_gamma_scaled(-1.0, 1.0), (-1.0f64).exp() - e1, 1e-12));
    }

    #[test]
    fn lower_plus_upper_is_gamma() {
        for (a, x) in [(0.25, 0.3), (1.5, 0.8), (2.5, 2.0), (0.75, 1.2)] {
            let total = (lower_gamma_scaled(a, x) + upper_gamma_scaled(a, x)) * x.powf(a);
            assert!(close(total, gamma(a), 1e-13), "a={a} x={x}");
        }
    }
}
