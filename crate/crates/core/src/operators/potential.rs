use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeBox};

/// Parameters of `h(x) = h0 + a |x - center|_1^beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub h0: f64,
    pub a: f64,
    pub beta: f64,
    pub center: Vec<i64>,
}

impl PotentialSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::validation(format!(
                "hypothesis (h1): h0 = {} must be positive",
                self.h0
            )));
        }
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return Err(Error::validation(format!("potential growth a = {} must be >= 0", self.a)));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::validation(format!("potential exponent beta = {} must be > 0", self.beta)));
        }
        if self.center.len() != dim {
            return Err(Error::validation(format!(
                "potential center has {} coordinates, expected {dim}",
                self.center.len()
            )));
        }
        Ok(())
    }
}

/// The confining potential `h` on a box, with `h >= h0 > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialField {
    h: Field,
    h0: f64,
    center: Vec<i64>,
}

impl PotentialField {
    pub fn new(lattice: LatticeBox, spec: &PotentialSpec) -> Result<Self> {
        spec.validate(lattice.dim())?;
        let h = Field::from_fn(lattice, |x| {
            let r: u64 = x.iter().zip(&spec.center).map(|(a, b)| a.abs_diff(*b)).sum();
            spec.h0 + spec.a * (r as f64).powf(spec.beta)
        });
        Ok(Self { h, h0: spec.h0, center: spec.center.clone() })
    }

    /// A user-supplied `h`; the hypotheses are checked.
    pub fn from_field(h: Field, h0: f64, center: Vec<i64>) -> Result<Self> {
        let out = Self { h, h0, center };
        out.check_hypotheses()?;
        Ok(out)
    }

    pub fn field(&self) -> &Field {
        &self.h
    }

    pub fn values(&self) -> &[f64] {
        self.h.values()
    }

    pub fn h0(&self) -> f64 {
        self.h0
    }

    pub fn center(&self) -> &[i64] {
        &self.center
    }

    /// `min h >= h0 > 0`, and `h` never decreases when a site moves one step
    /// away from the center along its largest coordinate offset.
    pub fn check_hypotheses(&self) -> Result<()> {
        let lattice = *self.h.lattice();
        if !(self.h0 > 0.0) {
            return Err(Error::validation(format!("hypothesis (h1): h0 = {} must be positive", self.h0)));
        }
        if self.center.len() != lattice.dim() {
            return Err(Error::validation("potential center has the wrong dimension"));
        }
        let min = self.h.min_value();
        if min < self.h0 {
            return Err(Error::validation(format!(
                "hypothesis (h1): min h = {min} is below h0 = {}",
                self.h0
            )));
        }
        let mut inner = vec![0i64; lattice.dim()];
        for (i, x) in lattice.sites().enumerate() {
            let Some(j) = (0..x.len()).max_by_key(|&j| (x[j] - self.center[j]).abs()) else {
                continue;
            };
            let offset = x[j] - self.center[j];
            if offset == 0 {
                continue;
            }
            inner.copy_from_slice(&x);
            inner[j] -= offset.signum();
            if let Some(k) = lattice.index_of(&inner) {
                if self.h.values()[i] < self.h.values()[k] {
                    return Err(Error::validation(format!(
                        "hypothesis (h2): h decreases moving outward from {inner:?} to {x:?}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_growth() {
        let b = LatticeBox::new(2, 3).unwrap();
        let spec = PotentialSpec { h0: 1.0, a: 1.0, beta: 1.0, center: vec![0, 0] };
        let h = PotentialField::new(b, &spec).unwrap();
        assert_eq!(h.field().get(&[0, 0]), Some(1.0));
        assert_eq!(h.field().get(&[-2, 3]), Some(6.0));
        h.check_hypotheses().unwrap();
    }

    #[test]
    fn rejects_bad_potentials() {
        let b = LatticeBox::new(1, 3).unwrap();
        let spec = PotentialSpec { h0: 0.0, a: 1.0, beta: 1.0, center: vec![0] };
        assert!(PotentialField::new(b, &spec).is_err());
        let dip = Field::from_fn(b, |x| if x[0] == 2 { 0.5 } else { 1.0 });
        assert!(PotentialField::from_field(dip, 0.4, vec![0]).is_err());
        let low = Field::from_fn(b, |_| 1.0);
        assert!(PotentialField::from_field(low, 2.0, vec![0]).is_err());
    }
}
