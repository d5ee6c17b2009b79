use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{DisplacementGrid, Field, LatticeBox};
use crate::numerics::{pairwise_sum, pairwise_sum_by};

use super::kernel::KernelTable;

/// The kernel `W_s` bound to one box: fractional gradients and the
/// fractional p-Laplacian, with all sums restricted to the box.
#[derive(Debug, Clone)]
pub struct KernelOperator {
    lattice: LatticeBox,
    kernel: KernelTable,
    offsets: Vec<isize>,
    center: isize,
}

impl KernelOperator {
    pub fn new(lattice: LatticeBox, kernel: KernelTable) -> Result<Self> {
        if !kernel.covers(&lattice) {
            return Err(Error::LatticeMismatch(format!(
                "kernel table (d = {}, reach {}) does not cover the box d = {}, L = {}",
                kernel.dim(),
                kernel.grid().reach(),
                lattice.dim(),
                lattice.radius()
            )));
        }
        let offsets = kernel.grid().site_offsets(&lattice);
        let center = kernel.grid().center() as isize;
        Ok(Self { lattice, kernel, offsets, center })
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn kernel(&self) -> &KernelTable {
        &self.kernel
    }

    pub fn grid(&self) -> &DisplacementGrid {
        self.kernel.grid()
    }

    #[inline]
    fn w(&self, x: usize, y: usize) -> f64 {
        self.kernel.values()[(self.center + self.offsets[x] - self.offsets[y]) as usize]
    }

    fn check(&self, u: &Field) -> Result<()> {
        if *u.lattice() != self.lattice {
            return Err(Error::LatticeMismatch("field and kernel operator live on different boxes".into()));
        }
        Ok(())
    }

    /// `sum_y term(x, y)` for every site `x`, site-parallel.
    fn site_sums(&self, term: impl Fn(usize, usize) -> f64 + Sync) -> Vec<f64> {
        let m = self.lattice.len();
        (0..m)
            .into_par_iter()
            .map(|x| pairwise_sum_by(m, |y| if y == x { 0.0 } else { term(x, y) }))
            .collect()
    }

    /// `grad u . grad v (x) = 1/2 sum_{y != x} W(x - y) (u(x) - u(y)) (v(x) - v(y))` at every site.
    pub fn gradient_forms(&self, u: &Field, v: &Field) -> Result<Vec<f64>> {
        self.check(u)?;
        self.check(v)?;
        let (u, v) = (u.values(), v.values());
        Ok(self.site_sums(|x, y| 0.5 * self.w(x, y) * (u[x] - u[y]) * (v[x] - v[y])))
    }

    pub fn gradient_form(&self, u: &Field, v: &Field, site: &[i64]) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        let x = self
            .lattice
            .index_of(site)
            .ok_or_else(|| Error::validation(format!("site {site:?} outside the box")))?;
        let (u, v) = (u.values(), v.values());
        Ok(pairwise_sum_by(self.lattice.len(), |y| {
            if y == x {
                0.0
            } else {
                0.5 * self.w(x, y) * (u[x] - u[y]) * (v[x] - v[y])
            }
        }))
    }

    /// `|grad u|(x)` at every site.
    pub fn gradient_lengths(&self, u: &Field) -> Result<Vec<f64>> {
        Ok(self.gradient_forms(u, u)?.into_iter().map(|g| g.max(0.0).sqrt()).collect())
    }

    pub fn gradient_length(&self, u: &Field, site: &[i64]) -> Result<f64> {
        Ok(self.gradient_form(u, u, site)?.max(0.0).sqrt())
    }

    /// `sum_x |grad u|^p(x)`.
    pub fn gradient_power_sum(&self, u: &Field, p: f64) -> Result<f64> {
        check_p(p)?;
        let forms = self.gradient_forms(u, u)?;
        let powered: Vec<f64> = forms.iter().map(|g| g.max(0.0).powf(p / 2.0)).collect();
        Ok(pairwise_sum(&powered))
    }

    /// `|grad u|^(p-2)` at every site: identically 1 for `p = 2`, 0 where the
    /// gradient vanishes for `p > 2`.
    pub fn gradient_weights(&self, u: &Field, p: f64) -> Result<Vec<f64>> {
        check_p(p)?;
        if p == 2.0 {
            self.check(u)?;
            return Ok(vec![1.0; self.lattice.len()]);
        }
        Ok(weights_from_forms(&self.gradient_forms(u, u)?, p))
    }

    /// `(-Delta)_p^s u (x) = 1/2 sum_{y != x} W(x - y) (|grad u|^(p-2)(x) + |grad u|^(p-2)(y)) (u(x) - u(y))`.
    pub fn p_laplacian(&self, u: &Field, p: f64) -> Result<Field> {
        let weights = self.gradient_weights(u, p)?;
        self.weighted_laplacian(u, &weights)
    }

    /// The p-Laplacian with precomputed `|grad u|^(p-2)` weights.
    pub(crate) fn weighted_laplacian(&self, u: &Field, weights: &[f64]) -> Result<Field> {
        self.check(u)?;
        let values = u.values();
        let out = self.site_sums(|x, y| {
            0.5 * self.w(x, y) * (weights[x] + weights[y]) * (values[x] - values[y])
        });
        Field::from_values(self.lattice, out)
    }

    /// The linear operator `sum_{y != x} W(x - y) (u(x) - u(y))`.
    pub fn apply_linear(&self, u: &Field) -> Result<Field> {
        self.check(u)?;
        let values = u.values();
        let out = self.site_sums(|x, y| self.w(x, y) * (values[x] - values[y]));
        Field::from_values(self.lattice, out)
    }
}

/// `|grad u|^(p-2)` from the gradient forms `|grad u|^2`.
pub(crate) fn weights_from_forms(forms: &[f64], p: f64) -> Vec<f64> {
    if p == 2.0 {
        return vec![1.0; forms.len()];
    }
    forms
        .iter()
        .map(|&g| if g > 0.0 { g.powf((p - 2.0) / 2.0) } else { 0.0 })
        .collect()
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::validation(format!("p = {p} must satisfy p >= 2")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::kernel::KernelModel;

    fn operator(d: usize, l: usize, s: f64) -> KernelOperator {
        let b = LatticeBox::new(d, l).unwrap();
        KernelOperator::new(b, KernelTable::build(KernelModel::PowerLaw, s, &b).unwrap()).unwrap()
    }

    #[test]
    fn three_site_indicator() {
        let op = operator(1, 1, 0.5);
        let u = Field::delta(*op.lattice(), &[0]).unwrap();
        assert!((op.gradient_form(&u, &u, &[0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((op.gradient_length(&u, &[0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((op.gradient_length(&u, &[1]).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn constants_are_annihilated() {
        let op = operator(2, 3, 0.4);
        let c = Field::from_fn(*op.lattice(), |_| 2.5);
        assert!(op.gradient_lengths(&c).unwrap().iter().all(|&g| g == 0.0));
        assert!(op.p_laplacian(&c, 3.0).unwrap().is_zero());
        assert!(op.p_laplacian(&c, 2.0).unwrap().is_zero());
    }

    #[test]
    fn p_two_is_linear() {
        let op = operator(2, 3, 0.5);
        let u = Field::from_fn(*op.lattice(), |x| (x[0] as f64 * 0.7).sin() + 0.1 * x[1] as f64);
        let a = op.p_laplacian(&u, 2.0).unwrap();
        let b = op.apply_linear(&u).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_foreign_fields_and_small_p() {
        let op = operator(1, 3, 0.5);
        let other = Field::zeros(LatticeBox::new(1, 2).unwrap());
        assert!(op.gradient_lengths(&other).is_err());
        let u = Field::zeros(*op.lattice());
        assert!(matches!(op.p_laplacian(&u, 1.5), Err(Error::Validation(_))));
    }
}
