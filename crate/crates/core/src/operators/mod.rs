//! Nonlocal lattice operators: the kernel `W_s`, fractional gradients and the
//! fractional p-Laplacian, Sobolev-type norms, the confining potential, and
//! convolution with the Green's function.

mod convolve;
mod hls;
mod kernel;
mod nonlocal;
mod potential;

pub use convolve::{ConvolutionMethod, GreenConvolver};
pub use hls::{hls_conjugate_exponent, hls_ratio, sample_hls_pair, HlsSample};
pub use kernel::{KernelModel, KernelTable, KernelViolation};
pub use nonlocal::KernelOperator;
pub(crate) use nonlocal::weights_from_forms;
pub use potential::{PotentialField, PotentialSpec};

use crate::error::Result;
use crate::lattice::Field;
use crate::numerics::pairwise_sum_by;

/// `sum_x |u(x)|^p`.
pub fn lp_norm_pow(u: &Field, p: f64) -> f64 {
    let v = u.values();
    pairwise_sum_by(v.len(), |i| v[i].abs().powf(p))
}

/// `(sum_x |u(x)|^p)^(1/p)`.
pub fn lp_norm(u: &Field, p: f64) -> f64 {
    lp_norm_pow(u, p).powf(1.0 / p)
}

/// `sum_x h(x) |u(x)|^p`.
pub fn weighted_lp_pow(u: &Field, h: &PotentialField, p: f64) -> Result<f64> {
    u.ensure_same_box(h.field())?;
    let (v, w) = (u.values(), h.values());
    Ok(pairwise_sum_by(v.len(), |i| w[i] * v[i].abs().powf(p)))
}

/// p-th power of the `H_{s,p}` norm, `sum_x |grad u|^p + h |u|^p`.
pub fn sobolev_norm_p(op: &KernelOperator, u: &Field, h: &PotentialField, p: f64) -> Result<f64> {
    Ok(op.gradient_power_sum(u, p)? + weighted_lp_pow(u, h, p)?)
}

/// Slack of `|a - b|^p <= 2^(p-2) p (|a|^(p-2) a - |b|^(p-2) b)(a - b)`, `p >= 2`.
/// Nonnegative whenever the inequality holds.
pub fn p_inequality_slack(a: f64, b: f64, p: f64) -> f64 {
    let phi = |t: f64| t.abs().powf(p - 2.0) * t;
    2f64.powf(p - 2.0) * p * (phi(a) - phi(b)) * (a - b) - (a - b).abs().powf(p)
}
