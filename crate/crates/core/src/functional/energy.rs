use serde::Serialize;

use crate::error::Result;
use crate::lattice::Field;
use crate::numerics::pairwise_sum;
use crate::operators::weighted_lp_pow;

use super::problem::Problem;

/// `total = norm_term - choquard_term`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    /// `(1/p) |u|_H^p`.
    pub norm_term: f64,
    /// `1/2 sum (R * F(u+)) F(u+)`.
    pub choquard_term: f64,
    pub total: f64,
}

/// Everything one field evaluation produces, from a single convolution and a
/// single pass over the gradient forms.
#[derive(Debug, Clone)]
pub struct Evaluation {
    /// `sum_x |grad u|^p`.
    pub gradient_term: f64,
    /// `sum_x h |u|^p`.
    pub potential_term: f64,
    /// `|u|_H^p`.
    pub norm_p: f64,
    /// `sum (R * F(u+)) F(u+)`.
    pub choquard_energy: f64,
    /// `A(u) = sum (R * F(u+)) f(u+) u+`.
    pub pairing: f64,
    pub energy: EnergyBreakdown,
    /// The Frechet gradient, when requested.
    pub gradient: Option<Field>,
}

impl Evaluation {
    /// `|u|_H^p - A(u)`.
    pub fn nehari_residual(&self) -> f64 {
        self.norm_p - self.pairing
    }
}

impl Problem {
    pub fn evaluate(&self, u: &Field, with_gradient: bool) -> Result<Evaluation> {
        self.check(u)?;
        let p = self.p();
        let nl = self.nonlinearity();
        let forms = self.operator().gradient_forms(u, u)?;
        let powered: Vec<f64> = forms.iter().map(|g| g.max(0.0).powf(p / 2.0)).collect();
        let gradient_term = pairwise_sum(&powered);
        let potential_term = weighted_lp_pow(u, self.potential(), p)?;
        let norm_p = gradient_term + potential_term;

        let big_f = self.primitive_field(u);
        let conv = self.convolver().convolve(&big_f, self.convolution_method())?;
        let (c, bf, uv) = (conv.values(), big_f.values(), u.values());
        let choquard_energy = self.sum(|i| c[i] * bf[i]);
        let pairing = self.sum(|i| c[i] * nl.f(uv[i]) * uv[i].max(0.0));

        let norm_term = norm_p / p;
        let choquard_term = 0.5 * choquard_energy;
        let energy = EnergyBreakdown { norm_term, choquard_term, total: norm_term - choquard_term };

        let gradient = if with_gradient {
            let weights = crate::operators::weights_from_forms(&forms, p);
            let mut g = self.operator().weighted_laplacian(u, &weights)?;
            let h = self.potential().values();
            for (i, gi) in g.values_mut().iter_mut().enumerate() {
                *gi += h[i] * uv[i].abs().powf(p - 2.0) * uv[i] - c[i] * nl.f(uv[i]);
            }
            Some(g)
        } else {
            None
        };
        Ok(Evaluation { gradient_term, potential_term, norm_p, choquard_energy, pairing, energy, gradient })
    }

    /// `sum (R * F(u+)) F(u+)`.
    pub fn choquard_energy(&self, u: &Field) -> Result<f64> {
        let conv = self.choquard_potential(u)?;
        let c = conv.values();
        let uv = u.values();
        let nl = self.nonlinearity();
        Ok(self.sum(|i| c[i] * nl.big_f(uv[i])))
    }

    /// `A(u) = sum (R * F(u+)) f(u+) u+`.
    pub fn choquard_pairing(&self, u: &Field) -> Result<f64> {
        let conv = self.choquard_potential(u)?;
        let c = conv.values();
        let uv = u.values();
        let nl = self.nonlinearity();
        Ok(self.sum(|i| c[i] * nl.f(uv[i]) * uv[i].max(0.0)))
    }

    /// `|u|_H^p = sum |grad u|^p + h |u|^p`.
    pub fn norm_p(&self, u: &Field) -> Result<f64> {
        crate::operators::sobolev_norm_p(self.operator(), u, self.potential(), self.p())
    }

    /// `J(u) = (1/p) |u|_H^p - 1/2 sum (R * F(u+)) F(u+)`.
    pub fn energy(&self, u: &Field) -> Result<EnergyBreakdown> {
        Ok(self.evaluate(u, false)?.energy)
    }

    /// `(-Delta)_p^s u + h |u|^(p-2) u - (R * F(u+)) f(u+)`.
    pub fn energy_gradient(&self, u: &Field) -> Result<Field> {
        Ok(self.evaluate(u, true)?.gradient.expect("gradient requested"))
    }
}
