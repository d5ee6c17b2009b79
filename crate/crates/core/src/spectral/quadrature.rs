//! Midpoint-shifted tensor grids on the torus `[0, 2 pi)^d`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::lattice::DisplacementGrid;
use crate::numerics::{fft_cube, pairwise_sum};

/// Largest accepted `|Im| / |Re|` of an assembled coefficient.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;

/// The grid `k_j = 2 pi (l_j + 1/2) / N`, `l_j = 0..N`, which never hits `k = 0`.
#[derive(Debug, Clone, Copy)]
pub struct MidpointTorus {
    dim: usize,
    n: usize,
}

impl MidpointTorus {
    pub fn new(dim: usize, n: usize) -> Self {
        Self { dim, n }
    }

    pub fn points_per_axis(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `mu(k) = 2d - 2 sum_j cos k_j` at every grid point, row-major.
    pub fn symbol_values(&self) -> Vec<f64> {
        let cosines: Vec<f64> = (0..self.n)
            .map(|l| (2.0 * PI * (l as f64 + 0.5) / self.n as f64).cos())
            .collect();
        let n = self.n;
        let dim = self.dim;
        (0..self.len())
            .into_par_iter()
            .map(|mut idx| {
                let mut sum = 0.0;
                for _ in 0..dim {
                    sum += cosines[idx % n];
                    idx /= n;
                }
                2.0 * dim as f64 - 2.0 * sum
            })
            .collect()
    }

    /// Grid average `N^-d sum_l g(mu(k_l))`.
    pub fn mean_of(&self, g: impl Fn(f64) -> f64 + Sync + Send) -> f64 {
        let values: Vec<f64> = self.symbol_values().into_par_iter().map(g).collect();
        pairwise_sum(&values) / self.len() as f64
    }

    /// `N^-d sum_l cos(z . k_l) g(mu(k_l))` for every `z` of `grid`.
    ///
    /// The sine parts vanish by the symmetry `k -> 2 pi - k` of the grid; each
    /// one is checked against [`IMAGINARY_TOLERANCE`] and then discarded.
    pub fn cosine_coefficients(
        &self,
        g: impl Fn(f64) -> f64 + Sync + Send,
        grid: &DisplacementGrid,
    ) -> Result<Vec<f64>> {
        if grid.dim() != self.dim {
            return Err(Error::validation("torus grid and displacement grid dimensions differ"));
        }
        if 2 * grid.reach() >= self.n {
            return Err(Error::validation(format!(
                "N = {} too small for displacements up to {}",
                self.n,
                grid.reach()
            )));
        }
        let mut data: Vec<Complex64> = self
            .symbol_values()
            .into_par_iter()
            .map(|m| Complex64::new(g(m), 0.0))
            .collect();
        fft_cube(&mut data, self.dim, self.n, FftDirection::Inverse);
        let norm = 1.0 / self.len() as f64;
        let n = self.n as i64;
        let mut z = vec![0i64; self.dim];
        let mut out = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            grid.coords_into(idx, &mut z);
            let flat = z
                .iter()
                .fold(0usize, |acc, &c| acc * self.n + c.rem_euclid(n) as usize);
            let shift = PI * z.iter().sum::<i64>() as f64 / self.n as f64;
            let value = data[flat] * Complex64::from_polar(1.0, shift) * norm;
            if value.im.abs() > IMAGINARY_TOLERANCE * value.re.abs() + 1e-15 {
                return Err(Error::Consistency(format!(
                    "torus coefficient at z = {z:?} has imaginary part {:e} against real part {:e}",
                    value.im, value.re
                )));
            }
            out.push(value.re);
        }
        Ok(out)
    }
}
