use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DisplacementGrid, LatticeBox};
use crate::spectral::{default_quadrature_points, symbol_power_coefficients, DEFAULT_BUILD_TOLERANCE};

/// How `W_s(z)` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelModel {
    /// `W(z) = |z|_1^(-d-2s)`.
    PowerLaw,
    /// `W(z) = -(2 pi)^-d int cos(z.k) mu(k)^s dk`, the kernel of `(-Delta)^s`.
    Spectral,
}

impl KernelModel {
    pub fn name(self) -> &'static str {
        match self {
            KernelModel::PowerLaw => "power-law",
            KernelModel::Spectral => "spectral",
        }
    }
}

impl std::str::FromStr for KernelModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power-law" => Ok(KernelModel::PowerLaw),
            "spectral" => Ok(KernelModel::Spectral),
            other => Err(Error::validation(format!("unknown kernel model {other:?}"))),
        }
    }
}

/// A displacement whose kernel entry breaks one of the table invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelViolation {
    pub z: Vec<i64>,
    pub value: f64,
    pub reason: String,
}

/// Kernel values `W_s(z)` for every displacement `0 < max_j |z_j| <= 2L`,
/// together with the constants of the two-sided bound
/// `c_lo |z|_1^(-d-2s) <= W(z) <= c_hi |z|_1^(-d-2s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    model: KernelModel,
    s: f64,
    grid: DisplacementGrid,
    values: Vec<f64>,
    c_lo: f64,
    c_hi: f64,
    cutoff: Option<u64>,
    quad_points: usize,
}

fn check_s(s: f64) -> Result<()> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::validation(format!("fractional order s = {s} must lie in (0, 1)")));
    }
    Ok(())
}

fn l1(z: &[i64]) -> u64 {
    z.iter().map(|c| c.unsigned_abs()).sum()
}

impl KernelTable {
    /// Builds the table for `lattice` with the default spectral resolution.
    pub fn build(model: KernelModel, s: f64, lattice: &LatticeBox) -> Result<Self> {
        let n = default_quadrature_points(lattice.dim()).max(4 * lattice.radius() + 2);
        Self::build_with(model, s, lattice, n + n % 2)
    }

    /// `quad_points` is only used by the spectral model.
    pub fn build_with(model: KernelModel, s: f64, lattice: &LatticeBox, quad_points: usize) -> Result<Self> {
        check_s(s)?;
        let grid = DisplacementGrid::for_box(lattice);
        let d = lattice.dim() as f64;
        let (mut values, quad_points) = match model {
            KernelModel::PowerLaw => {
                let mut z = vec![0i64; lattice.dim()];
                let values = (0..grid.len())
                    .map(|i| {
                        grid.coords_into(i, &mut z);
                        match l1(&z) {
                            0 => 0.0,
                            r => (r as f64).powf(-d - 2.0 * s),
                        }
                    })
                    .collect();
                (values, 0)
            }
            KernelModel::Spectral => (spectral_values(s, &grid, quad_points)?, quad_points),
        };
        values[grid.center()] = 0.0;

        let mut table = Self { model, s, grid, values, c_lo: 1.0, c_hi: 1.0, cutoff: None, quad_points };
        if model == KernelModel::Spectral {
            // Any nonpositive entry is reported here with its displacement.
            if let Some(v) = table.first_nonpositive() {
                return Err(Error::Data(format!(
                    "spectral kernel bound violated at z = {:?}: W = {:e}",
                    v.z, v.value
                )));
            }
            let (lo, hi) = table.fitted_bounds();
            table.c_lo = lo;
            table.c_hi = hi;
        }
        Ok(table)
    }

    pub fn model(&self) -> KernelModel {
        self.model
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn grid(&self) -> &DisplacementGrid {
        &self.grid
    }

    /// Row-major values on [`Self::grid`]; the entry at `z = 0` is 0.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn c_lo(&self) -> f64 {
        self.c_lo
    }

    pub fn c_hi(&self) -> f64 {
        self.c_hi
    }

    pub fn cutoff(&self) -> Option<u64> {
        self.cutoff
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn value(&self, z: &[i64]) -> Option<f64> {
        self.grid.index_of(z).map(|i| self.values[i])
    }

    pub fn covers(&self, lattice: &LatticeBox) -> bool {
        self.grid.covers(lattice)
    }

    /// Drops every interaction with `|z|_1 > radius`. Benchmarking only.
    pub fn with_cutoff(mut self, radius: u64) -> Self {
        let mut z = vec![0i64; self.dim()];
        for i in 0..self.grid.len() {
            self.grid.coords_into(i, &mut z);
            if l1(&z) > radius {
                self.values[i] = 0.0;
            }
        }
        self.cutoff = Some(radius);
        self
    }

    /// Overwrites one entry (and its mirror `-z`) without any checks.
    /// Used to inject faults into the verification suite.
    pub fn with_entry(mut self, z: &[i64], value: f64) -> Result<Self> {
        let i = self
            .grid
            .index_of(z)
            .ok_or_else(|| Error::validation(format!("displacement {z:?} outside the kernel table")))?;
        let mirror = self.grid.len() - 1 - i;
        self.values[i] = value;
        self.values[mirror] = value;
        Ok(self)
    }

    /// Reassembles a table from stored parts (cache files).
    pub fn from_parts(
        model: KernelModel,
        s: f64,
        grid: DisplacementGrid,
        values: Vec<f64>,
        bounds: (f64, f64),
        quad_points: usize,
    ) -> Result<Self> {
        check_s(s)?;
        if values.len() != grid.len() {
            return Err(Error::Data(format!(
                "kernel table has {} values for a grid of {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { model, s, grid, values, c_lo: bounds.0, c_hi: bounds.1, cutoff: None, quad_points })
    }

    fn first_nonpositive(&self) -> Option<KernelViolation> {
        let mut z = vec![0i64; self.dim()];
        (0..self.grid.len()).find_map(|i| {
            self.grid.coords_into(i, &mut z);
            (i != self.grid.center() && !(self.values[i] > 0.0)).then(|| KernelViolation {
                z: z.clone(),
                value: self.values[i],
                reason: "not strictly positive".into(),
            })
        })
    }

    /// Smallest and largest `W(z) |z|_1^(d+2s)` over the table.
    pub fn fitted_bounds(&self) -> (f64, f64) {
        let d = self.dim() as f64;
        let mut z = vec![0i64; self.dim()];
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..self.grid.len() {
            self.grid.coords_into(i, &mut z);
            let r = l1(&z);
            if r == 0 || self.cutoff.is_some_and(|c| r > c) {
                continue;
            }
            let ratio = self.values[i] * (r as f64).powf(d + 2.0 * self.s);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        (lo, hi)
    }

    /// Checks positivity, the symmetry `W(z) = W(-z)`, and the declared
    /// two-sided bound on every tabulated displacement (inside the cutoff).
    /// Returns every offending entry.
    pub fn check_bounds(&self) -> Vec<KernelViolation> {
        let d = self.dim() as f64;
        let slack = 1e-12;
        let mut out = Vec::new();
        let mut z = vec![0i64; self.dim()];
        for i in 0..self.grid.len() {
            self.grid.coords_into(i, &mut z);
            let r = l1(&z);
            if r == 0 || self.cutoff.is_some_and(|c| r > c) {
                continue;
            }
            let w = self.values[i];
            let mirror = self.values[self.grid.len() - 1 - i];
            let envelope = (r as f64).powf(-d - 2.0 * self.s);
            let reason = if !(w > 0.0) {
                Some("not strictly positive".to_string())
            } else if w != mirror {
                Some(format!("asymmetric: W(-z) = {mirror:e}"))
            } else if w < self.c_lo * envelope * (1.0 - slack) {
                Some(format!("below c_lo |z|^(-d-2s) = {:e}", self.c_lo * envelope))
            } else if w > self.c_hi * envelope * (1.0 + slack) {
                Some(format!("above c_hi |z|^(-d-2s) = {:e}", self.c_hi * envelope))
            } else {
                None
            };
            if let Some(reason) = reason {
                out.push(KernelViolation { z: z.clone(), value: w, reason });
            }
        }
        out
    }
}

/// `W(z) = -c(z)` where `c` are the alias-corrected coefficients of `mu^s`,
/// certified against a `2N` rebuild.
fn spectral_values(s: f64, grid: &DisplacementGrid, n: usize) -> Result<Vec<f64>> {
    if n < 32 || n % 2 != 0 || n < 2 * grid.reach() + 2 {
        return Err(Error::validation(format!(
            "spectral kernel needs an even N >= max(32, 4L + 2), got {n}"
        )));
    }
    let coarse = symbol_power_coefficients(2.0 * s, n, grid)?;
    let fine = symbol_power_coefficients(2.0 * s, 2 * n, grid)?;
    let center = grid.center();
    let scale = fine
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != center)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let (worst, delta) = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .enumerate()
        .filter(|&(i, _)| i != center)
        .fold((0, 0.0f64), |acc, (i, d)| if d > acc.1 { (i, d) } else { acc });
    if !(delta <= DEFAULT_BUILD_TOLERANCE * scale) {
        return Err(Error::Tolerance {
            what: format!("spectral kernel at z = {:?}", grid.displacement_of(worst)),
            n,
            refined_n: 2 * n,
            coarse: -coarse[worst],
            fine: -fine[worst],
            delta: delta / scale,
            tolerance: DEFAULT_BUILD_TOLERANCE,
        });
    }
    Ok(coarse.into_iter().map(|v| -v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_law_values() {
        let b = LatticeBox::new(1, 2).unwrap();
        let k = KernelTable::build(KernelModel::PowerLaw, 0.5, &b).unwrap();
        assert_eq!(k.value(&[1]), Some(1.0));
        assert_eq!(k.value(&[-2]), Some(0.25));
        assert_eq!(k.value(&[0]), Some(0.0));
        assert!(k.check_bounds().is_empty());
        let b = LatticeBox::new(2, 2).unwrap();
        let k = KernelTable::build(KernelModel::PowerLaw, 0.3, &b).unwrap();
        assert!((k.value(&[1, -1]).unwrap() - 2f64.powf(-2.6)).abs() < 1e-15);
    }

    #[test]
    fn s_validation() {
        let b = LatticeBox::new(1, 2).unwrap();
        assert!(matches!(KernelTable::build(KernelModel::PowerLaw, 1.0, &b), Err(Error::Validation(_))));
        assert!(matches!(KernelTable::build(KernelModel::Spectral, 0.0, &b), Err(Error::Validation(_))));
    }

    #[test]
    fn spectral_kernel_one_dimension() {
        // d = 1, s = 1/2: W(n) = 4 / (pi (4 n^2 - 1)) for n != 0.
        let b = LatticeBox::new(1, 6).unwrap();
        let k = KernelTable::build(KernelModel::Spectral, 0.5, &b).unwrap();
        for n in 1..=12i64 {
            let exact = 4.0 / (std::f64::consts::PI * (4 * n * n - 1) as f64);
            let got = k.value(&[n]).unwrap();
            assert!((got - exact).abs() < 1e-7 * exact, "n={n}: {got} vs {exact}");
        }
        assert!(k.c_lo() > 0.0 && k.c_lo() <= k.c_hi());
        assert!(k.check_bounds().is_empty());
    }

    #[test]
    fn injected_fault_is_reported() {
        let b = LatticeBox::new(2, 2).unwrap();
        let k = KernelTable::build(KernelModel::PowerLaw, 0.5, &b)
            .unwrap()
            .with_entry(&[1, 2], -0.1)
            .unwrap();
        let bad = k.check_bounds();
        assert_eq!(bad.len(), 2);
        assert!(bad.iter().any(|v| v.z == vec![1, 2]));
    }

    #[test]
    fn cutoff_drops_far_pairs() {
        let b = LatticeBox::new(1, 4).unwrap();
        let k = KernelTable::build(KernelModel::PowerLaw, 0.5, &b).unwrap().with_cutoff(3);
        assert_eq!(k.value(&[4]), Some(0.0));
        assert_eq!(k.value(&[3]), Some(1.0 / 9.0));
        assert!(k.check_bounds().is_empty());
    }
}
