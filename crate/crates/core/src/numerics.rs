//! Small numerical helpers shared by the modules: deterministic reductions,
//! straight-line fits, and multi-dimensional FFTs.

use rustfft::num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

const PAIRWISE_BLOCK: usize = 64;

/// Pairwise (tree) summation. The result depends only on the input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Pairwise summation of `term(0) + ... + term(n - 1)`.
pub fn pairwise_sum_by(n: usize, term: impl Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, term: &impl Fn(usize) -> f64) -> f64 {
        if hi - lo <= PAIRWISE_BLOCK {
            (lo..hi).map(term).sum()
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    if n == 0 {
        0.0
    } else {
        rec(0, n, &term)
    }
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms_residual: f64,
}

pub fn fit_line(points: &[(f64, f64)]) -> Option<LineFit> {
    let n = points.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    Some(LineFit { slope, intercept, rms_residual: (ss / nf).sqrt() })
}

/// Smallest `n >= min` whose only prime factors are 2, 3 and 5.
pub fn fft_friendly_len(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// In-place unnormalized FFT of a row-major `side^dim` cube.
pub fn fft_cube(data: &mut [Complex64], dim: usize, side: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), side.pow(dim as u32));
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(side, direction);
    let mut line = vec![Complex64::default(); side];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = side.pow((dim - 1 - axis) as u32);
        let block = stride * side;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn exact_line() {
        let pts: Vec<_> = (1..10).map(|i| (i as f64, 3.0 * i as f64 - 2.0)).collect();
        let fit = fit_line(&pts).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert!((fit.intercept + 2.0).abs() < 1e-12);
        assert!(fit.rms_residual < 1e-12);
    }

    #[test]
    fn friendly_lengths() {
        assert_eq!(fft_friendly_len(61), 64);
        assert_eq!(fft_friendly_len(33), 36);
        assert_eq!(fft_friendly_len(7), 8);
    }

    #[test]
    fn cube_fft_round_trip() {
        let dim = 2;
        let side = 6;
        let orig: Vec<Complex64> = (0..36).map(|i| Complex64::new(i as f64, -(i as f64) * 0.5)).collect();
        let mut data = orig.clone();
        fft_cube(&mut data, dim, side, FftDirection::Forward);
        // DC term is the plain sum.
        let sum: Complex64 = orig.iter().sum();
        assert!((data[0] - sum).norm() < 1e-9);
        fft_cube(&mut data, dim, side, FftDirection::Inverse);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a / 36.0 - b).norm() < 1e-9);
        }
    }
}
