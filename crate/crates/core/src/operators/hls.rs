use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::{Field, LatticeBox};

use super::convolve::{ConvolutionMethod, GreenConvolver};
use super::lp_norm;

/// The symmetric exponent `r = t = 2d / (d + alpha)`.
pub fn hls_conjugate_exponent(dim: usize, alpha: f64) -> f64 {
    2.0 * dim as f64 / (dim as f64 + alpha)
}

/// `sum (R_alpha * u) v / (|u|_r |v|_t)` for nonnegative `u, v` and
/// `1/r + 1/t + (d - alpha)/d = 2`.
pub fn hls_ratio(conv: &GreenConvolver, u: &Field, v: &Field, r: f64, t: f64) -> Result<f64> {
    let d = conv.lattice().dim() as f64;
    let alpha = conv.table().alpha();
    let relation = 1.0 / r + 1.0 / t + (d - alpha) / d;
    if !((relation - 2.0).abs() <= 1e-12) {
        return Err(Error::validation(format!(
            "HLS exponents r = {r}, t = {t} give 1/r + 1/t + (d - alpha)/d = {relation}, not 2"
        )));
    }
    if u.min_value() < 0.0 || v.min_value() < 0.0 {
        return Err(Error::validation("HLS ratio needs nonnegative fields"));
    }
    if u.is_zero() || v.is_zero() {
        return Err(Error::validation("HLS ratio is undefined for a zero field"));
    }
    let ru = conv.convolve(u, ConvolutionMethod::Fft)?;
    Ok(ru.dot(v)? / (lp_norm(u, r) * lp_norm(v, t)))
}

/// Outcome of [`sample_hls_pair`] runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HlsSample {
    pub samples: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

/// Uniform in `[0, 1)` from a seed and a site, so the same site gets the
/// same value in every box.
fn site_uniform(seed: u64, x: &[i64]) -> f64 {
    let mut h = seed;
    for &c in x {
        h = splitmix(h ^ c as u64);
    }
    (splitmix(h) >> 11) as f64 / (1u64 << 53) as f64
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn bump(lattice: LatticeBox, rng: &mut ChaCha8Rng) -> Field {
    let d = lattice.dim();
    let reach = lattice.radius().min(2) as i64;
    let center: Vec<f64> = (0..d).map(|_| rng.random_range(-reach..=reach) as f64).collect();
    let width: f64 = rng.random_range(0.5..2.5);
    let noise_seed: u64 = rng.random();
    Field::from_fn(lattice, |x| {
        let r2: f64 = x.iter().zip(&center).map(|(&a, b)| (a as f64 - b).powi(2)).sum();
        (-r2 / (2.0 * width * width)).exp() * (1.0 + 0.1 * site_uniform(noise_seed, x))
    })
}

/// Random nonnegative pairs of noisy Gaussian bumps (width in `[0.5, 2.5]`,
/// centers within distance 2 of the origin), so the sample law does not
/// depend on the box once the box holds the bumps.
pub fn sample_hls_pair(conv: &GreenConvolver, samples: usize, seed: u64) -> Result<HlsSample> {
    if samples == 0 {
        return Err(Error::validation("HLS sampling needs at least one sample"));
    }
    let lattice = *conv.lattice();
    let r = hls_conjugate_exponent(lattice.dim(), conv.table().alpha());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_ratio = 0.0f64;
    let mut total = 0.0;
    for _ in 0..samples {
        let u = bump(lattice, &mut rng);
        let v = bump(lattice, &mut rng);
        let q = hls_ratio(conv, &u, &v, r, r)?;
        max_ratio = max_ratio.max(q);
        total += q;
    }
    Ok(HlsSample { samples, max_ratio, mean_ratio: total / samples as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::compute_green_table;

    fn convolver() -> GreenConvolver {
        let b = LatticeBox::new(2, 4).unwrap();
        GreenConvolver::new(b, compute_green_table(2, 1.0, 4, 64).unwrap()).unwrap()
    }

    #[test]
    fn single_site_ratio_is_r0() {
        let c = convolver();
        let e = Field::delta(*c.lattice(), &[0, 0]).unwrap();
        let r = hls_conjugate_exponent(2, 1.0);
        let q = hls_ratio(&c, &e, &e, r, r).unwrap();
        assert!((q - c.table().value(&[0, 0]).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn scaling_invariance() {
        let c = convolver();
        let b = *c.lattice();
        let u = Field::from_fn(b, |x| 1.0 / (1.0 + (x[0] * x[0] + x[1] * x[1]) as f64));
        let v = Field::from_fn(b, |x| (-(x[0] - x[1]).abs() as f64).exp());
        let r = hls_conjugate_exponent(2, 1.0);
        let q = hls_ratio(&c, &u, &v, r, r).unwrap();
        let q2 = hls_ratio(&c, &u.scaled(3.7), &v.scaled(0.02), r, r).unwrap();
        assert!((q - q2).abs() < 1e-10 * q);
    }

    #[test]
    fn exponent_relation_enforced() {
        let c = convolver();
        let e = Field::delta(*c.lattice(), &[0, 0]).unwrap();
        assert!(matches!(hls_ratio(&c, &e, &e, 2.0, 2.0), Err(Error::Validation(_))));
        assert!(hls_ratio(&c, &e.scaled(-1.0), &e, 4.0 / 3.0, 4.0 / 3.0).is_err());
    }
}
