//! Aliasing tails of the midpoint torus rule.
//!
//! For an integrand that behaves like `|k|^gamma` at the origin, the midpoint
//! rule on the half-shifted grid `k = 2 pi (l + 1/2) / N` returns the exact
//! Fourier coefficient at `z` plus the alternating image sum
//! `sum_{m != 0} (-1)^(m_1 + ... + m_d) c(z + m N)`. The far-field coefficients
//! `c(x) ~ c_{d,gamma} |x|^(-d-gamma)` turn that tail into
//! `c_{d,gamma} N^(-d-gamma) S(d + gamma, z / N)` with the lattice sum `S`
//! below, which is evaluated by Ewald splitting.

use std::f64::consts::PI;

use super::special::{lower_gamma_scaled, recip_gamma, upper_gamma_scaled};

/// Terms with `pi |x|^2` above this are below `1e-19` relative and dropped.
const EWALD_CUTOFF: f64 = 45.0;

/// Far-field constant of `|k|^gamma`:
/// `(2 pi)^-d int e^{i x.k} |k|^gamma dk = c_{d,gamma} |x|^(-d-gamma)`.
pub fn riesz_coefficient(dim: usize, gamma: f64) -> f64 {
    let d = dim as f64;
    2f64.powf(gamma) * statrs::function::gamma::gamma((d + gamma) / 2.0) * recip_gamma(-gamma / 2.0)
        / PI.powf(d / 2.0)
}

/// `S(s, w) = sum_{m in Z^d, m != 0} (-1)^(m_1 + ... + m_d) |m + w|^(-s)`,
/// analytically continued in `s > 0`, for shifts `|w_j| <= 1/2`.
#[derive(Debug, Clone)]
pub struct AlternatingLatticeSum {
    dim: usize,
    s: f64,
    prefactor: f64,
    real_shifts: Vec<(Vec<f64>, f64)>,
    reciprocal: Vec<(Vec<f64>, f64)>,
}

impl AlternatingLatticeSum {
    pub fn new(dim: usize, s: f64) -> Self {
        assert!(s > 0.0, "lattice sum exponent must be positive");
        let d = dim as f64;
        let half = s / 2.0;
        let reach = 6i64;
        let mut real_shifts = Vec::new();
        let mut reciprocal = Vec::new();
        let mut m = vec![-reach; dim];
        loop {
            let parity = m.iter().sum::<i64>().rem_euclid(2);
            let sign = if parity == 0 { 1.0 } else { -1.0 };
            let norm = (m.iter().map(|&c| (c * c) as f64).sum::<f64>()).sqrt();
            if m.iter().any(|&c| c != 0) && norm <= (EWALD_CUTOFF / PI).sqrt() + d.sqrt() / 2.0 {
                let point: Vec<f64> = m.iter().map(|&c| c as f64).collect();
                real_shifts.push((point, sign));
            }
            // Reciprocal points k - (1/2, ..., 1/2); never zero.
            let kc: Vec<f64> = m.iter().map(|&c| c as f64 - 0.5).collect();
            let q = PI * kc.iter().map(|v| v * v).sum::<f64>();
            if q <= EWALD_CUTOFF {
                let weight = upper_gamma_scaled((d - s) / 2.0, q);
                reciprocal.push((kc, weight));
            }
            if !advance(&mut m, -reach, reach + 1) {
                break;
            }
        }
        Self {
            dim,
            s,
            prefactor: PI.powf(half) * recip_gamma(half),
            real_shifts,
            reciprocal,
        }
    }

    pub fn exponent(&self) -> f64 {
        self.s
    }

    pub fn eval(&self, w: &[f64]) -> f64 {
        debug_assert_eq!(w.len(), self.dim);
        let half = self.s / 2.0;
        let mut total = 0.0;
        for (m, sign) in &self.real_shifts {
            let q = PI * m.iter().zip(w).map(|(a, b)| (a + b) * (a + b)).sum::<f64>();
            if q <= EWALD_CUTOFF {
                total += sign * upper_gamma_scaled(half, q);
            }
        }
        let q0 = PI * w.iter().map(|v| v * v).sum::<f64>();
        total -= lower_gamma_scaled(half, q0);
        for (kc, weight) in &self.reciprocal {
            let phase = 2.0 * PI * kc.iter().zip(w).map(|(a, b)| a * b).sum::<f64>();
            total += phase.cos() * weight;
        }
        self.prefactor * total
    }
}

/// Odometer over `[lo, hi)^d`; returns false after the last point.
fn advance(m: &mut [i64], lo: i64, hi: i64) -> bool {
    for c in m.iter_mut().rev() {
        *c += 1;
        if *c < hi {
            return true;
        }
        *c = lo;
    }
    false
}
