//! Torus integrals of the lattice Laplacian symbol: the fractional degree
//! `K_alpha`, the Green's function `R_alpha`, and the spectral kernel.
//!
//! Every integral is a midpoint-shifted tensor rule on `[0, 2 pi)^d` (the grid
//! never samples the singular point `k = 0`) followed by subtraction of the
//! analytic aliasing tail described in [`alias`]. Accuracy is certified by
//! re-running at `2N` and comparing.

pub mod alias;
mod green;
pub mod quadrature;
pub mod special;

use std::collections::HashMap;
use std::f64::consts::PI;

pub use green::{
    compute_green_table, compute_green_table_with, fit_decay_exponent, DecayFit, GreenOptions,
    GreenTable,
};

use crate::error::{Error, Result};
use crate::lattice::DisplacementGrid;
use alias::{riesz_coefficient, AlternatingLatticeSum};
use quadrature::MidpointTorus;

/// Relative N versus 2N tolerance applied when building tables.
pub const DEFAULT_BUILD_TOLERANCE: f64 = 1e-6;

/// Default quadrature points per dimension.
pub fn default_quadrature_points(dim: usize) -> usize {
    match dim {
        1 | 2 => 256,
        3 => 96,
        _ => 32,
    }
}

/// A point `k` of the torus `[0, 2 pi)^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint(Vec<f64>);

impl TorusPoint {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.is_empty() {
            return Err(Error::validation("torus point needs at least one component"));
        }
        if let Some(bad) = k.iter().find(|v| !(0.0..2.0 * PI).contains(*v)) {
            return Err(Error::validation(format!("torus component {bad} outside [0, 2 pi)")));
        }
        Ok(Self(k))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[f64] {
        &self.0
    }
}

/// Symbol of the lattice Laplacian, `mu(k) = 2d - 2 sum_j cos k_j`, in `[0, 4d]`.
pub fn mu(k: &TorusPoint) -> f64 {
    let d = k.dim() as f64;
    (2.0 * d - 2.0 * k.components().iter().map(|c| c.cos()).sum::<f64>()).max(0.0)
}

fn check_alpha(dim: usize, alpha: f64) -> Result<()> {
    if dim < 1 {
        return Err(Error::validation("dimension must be at least 1"));
    }
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::validation(format!(
            "alpha = {alpha} must lie strictly inside (0, d) = (0, {dim})"
        )));
    }
    Ok(())
}

/// `K_alpha` at a single resolution `N`, alias-corrected.
pub fn k_alpha_at(dim: usize, alpha: f64, n: usize) -> Result<f64> {
    check_alpha(dim, alpha)?;
    if n < 16 || n % 2 != 0 {
        return Err(Error::validation(format!("K_alpha needs an even N >= 16, got {n}")));
    }
    let raw = MidpointTorus::new(dim, n).mean_of(|m| m.powf(alpha / 2.0));
    let s = dim as f64 + alpha;
    let tail = riesz_coefficient(dim, alpha) * (n as f64).powf(-s)
        * AlternatingLatticeSum::new(dim, s).eval(&vec![0.0; dim]);
    Ok(raw - tail)
}

/// Result of a quantity computed at `N` and re-checked at `2N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refined {
    pub value: f64,
    pub refined: f64,
    pub relative_change: f64,
}

/// `K_alpha = (2 pi)^-d int mu^(alpha/2) dk`, accepted once `N -> 2N` moves it
/// by at most `tolerance` (relative).
pub fn compute_k_alpha_with_tolerance(
    dim: usize,
    alpha: f64,
    n: usize,
    tolerance: f64,
) -> Result<Refined> {
    let value = k_alpha_at(dim, alpha, n)?;
    let refined = k_alpha_at(dim, alpha, 2 * n)?;
    let relative_change = (value - refined).abs() / refined.abs();
    if !(relative_change <= tolerance) {
        return Err(Error::Tolerance {
            what: "K_alpha".into(),
            n,
            refined_n: 2 * n,
            coarse: value,
            fine: refined,
            delta: relative_change,
            tolerance,
        });
    }
    if !(value > 0.0) {
        return Err(Error::Consistency(format!("K_alpha = {value} is not positive")));
    }
    Ok(Refined { value, refined, relative_change })
}

/// [`compute_k_alpha_with_tolerance`] at [`DEFAULT_BUILD_TOLERANCE`].
pub fn compute_k_alpha(dim: usize, alpha: f64, n: usize) -> Result<f64> {
    compute_k_alpha_with_tolerance(dim, alpha, n, DEFAULT_BUILD_TOLERANCE).map(|r| r.value)
}

/// Canonical representative of `z` under sign flips and coordinate permutations.
pub(crate) fn canonical(z: &[i64]) -> Vec<i64> {
    let mut key: Vec<i64> = z.iter().map(|c| c.abs()).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    key
}

/// Alias-corrected `(2 pi)^-d int cos(z . k) mu(k)^(power/2) dk` for every `z`
/// of `grid`, on `N` points per axis.
///
/// `power` is the exponent of `|k|` at the origin (`-alpha` for the Green's
/// function, `2s` for the spectral kernel). Values are assigned per symmetry
/// class so the output is exactly invariant under sign flips and permutations.
pub fn symbol_power_coefficients(power: f64, n: usize, grid: &DisplacementGrid) -> Result<Vec<f64>> {
    let dim = grid.dim();
    let raw = MidpointTorus::new(dim, n).cosine_coefficients(|m| m.powf(power / 2.0), grid)?;
    let s = dim as f64 + power;
    let coefficient = riesz_coefficient(dim, power);
    let lattice_sum = (coefficient != 0.0).then(|| AlternatingLatticeSum::new(dim, s));
    let scale = (n as f64).powf(-s);

    let mut classes: HashMap<Vec<i64>, f64> = HashMap::new();
    let mut z = vec![0i64; dim];
    for idx in 0..grid.len() {
        grid.coords_into(idx, &mut z);
        let key = canonical(&z);
        classes.entry(key).or_insert_with_key(|key| {
            let rep = grid.index_of(key).expect("canonical displacement stays in the grid");
            let tail = lattice_sum.as_ref().map_or(0.0, |sum| {
                let w: Vec<f64> = key.iter().map(|&c| c as f64 / n as f64).collect();
                coefficient * scale * sum.eval(&w)
            });
            raw[rep] - tail
        });
    }
    Ok((0..grid.len())
        .map(|idx| {
            grid.coords_into(idx, &mut z);
            classes[&canonical(&z)]
        })
        .collect())
}
