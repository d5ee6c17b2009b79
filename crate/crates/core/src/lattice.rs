//! Truncated lattice boxes `[-L, L]^d` of `Z^d`.
//!
//! Sites are stored in row-major order: the last coordinate varies fastest,
//! each coordinate runs over `-L..=L`. The same ordering is used for field
//! dumps, so files written by one run compare byte-for-byte with the next.

use crate::error::{Error, Result};

/// Default cap on the number of sites in a box.
pub const DEFAULT_SITE_BUDGET: usize = 1 << 22;

/// The box `[-L, L]^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    dim: usize,
    radius: usize,
    side: usize,
    len: usize,
}

impl LatticeBox {
    pub fn new(dim: usize, radius: usize) -> Result<Self> {
        Self::with_budget(dim, radius, DEFAULT_SITE_BUDGET)
    }

    pub fn with_budget(dim: usize, radius: usize, budget: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::validation("lattice dimension d must be at least 1"));
        }
        if radius < 1 {
            return Err(Error::validation("box radius L must be at least 1"));
        }
        let side = 2 * radius + 1;
        let len = u32::try_from(dim)
            .ok()
            .and_then(|d| side.checked_pow(d))
            .filter(|&n| n <= budget)
            .ok_or(Error::Capacity { dim, radius, budget })?;
        Ok(Self { dim, radius, side, len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The box radius `L`.
    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Sites per coordinate axis, `2L + 1`.
    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of sites `M = (2L + 1)^d`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Writes the coordinates of site `index` into `out` (length `d`).
    pub fn coords_into(&self, index: usize, out: &mut [i64]) {
        debug_assert!(index < self.len);
        debug_assert_eq!(out.len(), self.dim);
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % self.side) as i64 - self.radius as i64;
            rest /= self.side;
        }
    }

    pub fn site_of(&self, index: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        self.coords_into(index, &mut out);
        out
    }

    /// Flat index of a site, or `None` if it lies outside the box.
    pub fn index_of(&self, site: &[i64]) -> Option<usize> {
        if site.len() != self.dim {
            return None;
        }
        let r = self.radius as i64;
        site.iter().try_fold(0usize, |acc, &c| {
            (-r..=r)
                .contains(&c)
                .then(|| acc * self.side + (c + r) as usize)
        })
    }

    pub fn origin(&self) -> usize {
        (self.len - 1) / 2
    }

    pub fn sites(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len).map(move |i| self.site_of(i))
    }

    /// All site coordinates, flattened (`d` entries per site).
    pub fn coordinate_table(&self) -> Vec<i64> {
        let mut table = vec![0; self.len * self.dim];
        for (i, chunk) in table.chunks_mut(self.dim).enumerate() {
            self.coords_into(i, chunk);
        }
        table
    }

    /// `|x - center|_1` for every site.
    pub fn l1_norms_from(&self, center: &[i64]) -> Result<Vec<u64>> {
        if center.len() != self.dim {
            return Err(Error::validation(format!(
                "center has dimension {} but the box has dimension {}",
                center.len(),
                self.dim
            )));
        }
        let coords = self.coordinate_table();
        Ok(coords
            .chunks(self.dim)
            .map(|x| x.iter().zip(center).map(|(a, b)| a.abs_diff(*b)).sum())
            .collect())
    }
}

/// Graph distance on `Z^d`: the number of lattice edges between `x` and `y`.
pub fn l1_distance(x: &[i64], y: &[i64]) -> Result<u64> {
    if x.len() != y.len() {
        return Err(Error::validation(format!(
            "sites of different dimensions ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    Ok(x.iter().zip(y).map(|(a, b)| a.abs_diff(*b)).sum())
}

/// Row-major grid of displacement vectors `z` with `max_j |z_j| <= reach`.
///
/// Tables of kernel and Green's function values are stored on this grid. For
/// sites `x, y` of a box, the index of `x - y` is `center + offset(x) - offset(y)`
/// where `offset` is linear in the coordinates, which keeps pair loops cheap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DisplacementGrid {
    dim: usize,
    reach: usize,
    side: usize,
    len: usize,
}

impl DisplacementGrid {
    pub fn new(dim: usize, reach: usize) -> Result<Self> {
        if dim < 1 {
            return Err(Error::validation("displacement grid needs d >= 1"));
        }
        let side = 2 * reach + 1;
        let len = u32::try_from(dim)
            .ok()
            .and_then(|d| side.checked_pow(d))
            .ok_or_else(|| Error::validation("displacement grid too large"))?;
        Ok(Self { dim, reach, side, len })
    }

    /// The grid needed by every pair of sites in `lattice` (reach `2L`).
    pub fn for_box(lattice: &LatticeBox) -> Self {
        Self::new(lattice.dim(), 2 * lattice.radius()).expect("box already validated")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn reach(&self) -> usize {
        self.reach
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the zero displacement.
    pub fn center(&self) -> usize {
        (self.len - 1) / 2
    }

    pub fn index_of(&self, z: &[i64]) -> Option<usize> {
        if z.len() != self.dim {
            return None;
        }
        let r = self.reach as i64;
        z.iter().try_fold(0usize, |acc, &c| {
            (-r..=r)
                .contains(&c)
                .then(|| acc * self.side + (c + r) as usize)
        })
    }

    pub fn coords_into(&self, index: usize, out: &mut [i64]) {
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % self.side) as i64 - self.reach as i64;
            rest /= self.side;
        }
    }

    pub fn displacement_of(&self, index: usize) -> Vec<i64> {
        let mut out = vec![0; self.dim];
        self.coords_into(index, &mut out);
        out
    }

    /// Linear offsets of the sites of `lattice` inside this grid; see the type docs.
    pub fn site_offsets(&self, lattice: &LatticeBox) -> Vec<isize> {
        let coords = lattice.coordinate_table();
        coords
            .chunks(lattice.dim())
            .map(|x| {
                x.iter()
                    .fold(0isize, |acc, &c| acc * self.side as isize + c as isize)
            })
            .collect()
    }

    pub fn covers(&self, lattice: &LatticeBox) -> bool {
        self.dim == lattice.dim() && self.reach >= 2 * lattice.radius()
    }
}

/// A real function on the sites of a box.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    lattice: LatticeBox,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(lattice: LatticeBox) -> Self {
        Self { lattice, values: vec![0.0; lattice.len()] }
    }

    pub fn from_values(lattice: LatticeBox, values: Vec<f64>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::LatticeMismatch(format!(
                "field has {} values but the box has {} sites",
                values.len(),
                lattice.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::validation(format!("field value at site {i} is not finite")));
        }
        Ok(Self { lattice, values })
    }

    pub fn from_fn(lattice: LatticeBox, mut f: impl FnMut(&[i64]) -> f64) -> Self {
        let mut site = vec![0; lattice.dim()];
        let values = (0..lattice.len())
            .map(|i| {
                lattice.coords_into(i, &mut site);
                f(&site)
            })
            .collect();
        Self { lattice, values }
    }

    /// Unit mass at the site `site`.
    pub fn delta(lattice: LatticeBox, site: &[i64]) -> Result<Self> {
        let i = lattice
            .index_of(site)
            .ok_or_else(|| Error::validation("delta site outside the box"))?;
        let mut f = Self::zeros(lattice);
        f.values[i] = 1.0;
        Ok(f)
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, site: &[i64]) -> Option<f64> {
        self.lattice.index_of(site).map(|i| self.values[i])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { lattice: self.lattice, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Field) -> Result<Self> {
        self.ensure_same_box(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + c * b)
            .collect();
        Ok(Self { lattice: self.lattice, values })
    }

    pub fn ensure_same_box(&self, other: &Field) -> Result<()> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch("fields live on different boxes".into()));
        }
        Ok(())
    }

    /// Pointwise `max(u, 0)`.
    pub fn positive_part(&self) -> Self {
        self.map(|v| v.max(0.0))
    }

    /// Pointwise `min(u, 0)`.
    pub fn negative_part(&self) -> Self {
        self.map(|v| v.min(0.0))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn dot(&self, other: &Field) -> Result<f64> {
        self.ensure_same_box(other)?;
        Ok(crate::numerics::pairwise_sum_by(self.values.len(), |i| {
            self.values[i] * other.values[i]
        }))
    }
}
