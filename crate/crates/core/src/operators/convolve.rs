use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeBox};
use crate::numerics::{fft_cube, fft_friendly_len, pairwise_sum_by};
use crate::spectral::GreenTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConvolutionMethod {
    Direct,
    Fft,
}

/// `(R_alpha * g)(x) = sum_{y in box} R_alpha(x - y) g(y)` on one box.
///
/// The FFT path embeds the box in a zero-padded cube of side at least `4L + 1`
/// so the circular convolution equals the linear one on the box.
#[derive(Debug, Clone)]
pub struct GreenConvolver {
    lattice: LatticeBox,
    table: GreenTable,
    offsets: Vec<isize>,
    padded_side: usize,
    kernel_hat: Vec<Complex64>,
}

impl GreenConvolver {
    pub fn new(lattice: LatticeBox, table: GreenTable) -> Result<Self> {
        if !table.covers(&lattice) {
            return Err(Error::validation(format!(
                "Green table (d = {}, reach {}) does not cover the box d = {}, L = {}",
                table.dim(),
                table.grid().reach(),
                lattice.dim(),
                lattice.radius()
            )));
        }
        let offsets = table.grid().site_offsets(&lattice);
        let d = lattice.dim();
        let reach = 2 * lattice.radius() as i64;
        let side = fft_friendly_len(4 * lattice.radius() + 1);
        let mut kernel_hat = vec![Complex64::default(); side.pow(d as u32)];
        let mut z = vec![0i64; d];
        for idx in 0..kernel_hat.len() {
            let mut rest = idx;
            for slot in z.iter_mut().rev() {
                let c = (rest % side) as i64;
                rest /= side;
                *slot = if c <= reach { c } else { c - side as i64 };
            }
            if let Some(v) = table.value(&z).filter(|_| z.iter().all(|c| c.abs() <= reach)) {
                kernel_hat[idx] = Complex64::new(v, 0.0);
            }
        }
        fft_cube(&mut kernel_hat, d, side, FftDirection::Forward);
        Ok(Self { lattice, table, offsets, padded_side: side, kernel_hat })
    }

    pub fn lattice(&self) -> &LatticeBox {
        &self.lattice
    }

    pub fn table(&self) -> &GreenTable {
        &self.table
    }

    pub fn padded_side(&self) -> usize {
        self.padded_side
    }

    pub fn convolve(&self, g: &Field, method: ConvolutionMethod) -> Result<Field> {
        if *g.lattice() != self.lattice {
            return Err(Error::LatticeMismatch("field and convolver live on different boxes".into()));
        }
        match method {
            ConvolutionMethod::Direct => self.direct(g),
            ConvolutionMethod::Fft => self.fft(g),
        }
    }

    fn direct(&self, g: &Field) -> Result<Field> {
        let m = self.lattice.len();
        let center = self.table.grid().center() as isize;
        let r = self.table.values();
        let gv = g.values();
        let out = (0..m)
            .into_par_iter()
            .map(|x| {
                pairwise_sum_by(m, |y| r[(center + self.offsets[x] - self.offsets[y]) as usize] * gv[y])
            })
            .collect();
        Field::from_values(self.lattice, out)
    }

    fn fft(&self, g: &Field) -> Result<Field> {
        let d = self.lattice.dim();
        let side = self.padded_side;
        let l = self.lattice.radius() as i64;
        let mut buf = vec![Complex64::default(); self.kernel_hat.len()];
        let mut x = vec![0i64; d];
        let flat = |x: &[i64]| x.iter().fold(0usize, |acc, &c| acc * side + (c + l) as usize);
        for (i, v) in g.values().iter().enumerate() {
            self.lattice.coords_into(i, &mut x);
            buf[flat(&x)] = Complex64::new(*v, 0.0);
        }
        fft_cube(&mut buf, d, side, FftDirection::Forward);
        buf.par_iter_mut().zip(&self.kernel_hat).for_each(|(a, b)| *a *= b);
        fft_cube(&mut buf, d, side, FftDirection::Inverse);
        let norm = 1.0 / buf.len() as f64;
        let out = (0..self.lattice.len())
            .map(|i| {
                self.lattice.coords_into(i, &mut x);
                buf[flat(&x)].re * norm
            })
            .collect();
        Field::from_values(self.lattice, out)
    }

    /// `max |direct - fft| / max(|direct|)`; zero for the zero field.
    pub fn method_discrepancy(&self, g: &Field) -> Result<f64> {
        let a = self.convolve(g, ConvolutionMethod::Direct)?;
        let b = self.convolve(g, ConvolutionMethod::Fft)?;
        let scale = a.sup_norm();
        if scale == 0.0 {
            return Ok(b.sup_norm());
        }
        let diff = a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        Ok(diff / scale)
    }
}
