//! Green's function and `K_alpha` against oracles that avoid the torus
//! quadrature entirely.
//!
//! d = 1: `(2 pi)^-1 int |2 sin(k/2)|^(-alpha) cos(zk) dk` has the closed form
//! `G(1-alpha) G(z+alpha/2) / (G(alpha/2) G(1-alpha/2) G(z+1-alpha/2))`, and
//! `K_alpha = G(1+alpha) / G(1+alpha/2)^2`.
//!
//! d = 2: subordination to the heat kernel,
//! `mu^(-a) = G(a)^-1 int t^(a-1) e^(-t mu) dt` with
//! `(2 pi)^-d int e^(iz.k - t mu) dk = prod_i e^(-2t) I_{z_i}(2t)`.

use statrs::function::gamma::{gamma, ln_gamma};

use choquard_lattice::spectral::{compute_green_table, compute_k_alpha};

fn riesz_1d(alpha: f64, z: i64) -> f64 {
    let z = z.unsigned_abs() as f64;
    let a = alpha / 2.0;
    (ln_gamma(1.0 - alpha) + ln_gamma(z + a) - ln_gamma(a) - ln_gamma(1.0 - a) - ln_gamma(z + 1.0 - a)).exp()
}

fn k_alpha_1d(alpha: f64) -> f64 {
    gamma(1.0 + alpha) / gamma(1.0 + alpha / 2.0).powi(2)
}

/// `e^-x I_n(x) = pi^-1 int_0^pi e^(x (cos th - 1)) cos(n th) dth`; the
/// integrand is smooth and periodic, so the trapezoid rule is spectrally
/// accurate once the peak of width `x^-1/2` is resolved.
fn scaled_bessel_i(n: i64, x: f64) -> f64 {
    let m = (64.0 + 40.0 * x.sqrt()) as usize;
    let h = std::f64::consts::PI / m as f64;
    let mut sum = 0.0;
    for j in 0..=m {
        let th = j as f64 * h;
        let w = if j == 0 || j == m { 0.5 } else { 1.0 };
        sum += w * (x * (th.cos() - 1.0)).exp() * (n as f64 * th).cos();
    }
    sum * h / std::f64::consts::PI
}

/// `int_lo^hi f(e^s) e^s ds` by the trapezoid rule in `s = ln t`.
fn log_trapezoid(lo: f64, hi: f64, steps: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / steps as f64;
    (0..=steps)
        .map(|j| {
            let t = (lo + j as f64 * h).exp();
            let w = if j == 0 || j == steps { 0.5 } else { 1.0 };
            w * f(t) * t
        })
        .sum::<f64>()
        * h
}

const T_MAX: f64 = 2.0e4;

/// `(2 pi)^-2 int e^(iz.k) mu^(-alpha/2) dk` in d = 2.
fn riesz_2d_unnormalized(alpha: f64, z: [i64; 2]) -> f64 {
    let a = alpha / 2.0;
    let body = log_trapezoid(-40.0, T_MAX.ln(), 4000, |t| {
        t.powf(a - 1.0) * scaled_bessel_i(z[0], 2.0 * t) * scaled_bessel_i(z[1], 2.0 * t)
    });
    // e^-x I_n(x) ~ (2 pi x)^-1/2 (1 - (4n^2 - 1)/(8x)) beyond T_MAX.
    let c: f64 = z.iter().map(|&n| (4.0 * (n * n) as f64 - 1.0) / 16.0).sum();
    let e = a - 2.0;
    let tail = (4.0 * std::f64::consts::PI).recip() * (-T_MAX.powf(e + 1.0) / (e + 1.0) + c * T_MAX.powf(e) / e);
    (body + tail) / gamma(a)
}

/// `(2 pi)^-2 int mu^(alpha/2) dk` via `mu^a = a / G(1-a) int (1 - e^(-t mu)) t^(-a-1) dt`.
fn k_alpha_2d(alpha: f64) -> f64 {
    let a = alpha / 2.0;
    let body = log_trapezoid(-40.0, T_MAX.ln(), 4000, |t| (1.0 - scaled_bessel_i(0, 2.0 * t).powi(2)) * t.powf(-a - 1.0));
    // 1 - (4 pi t)^-1 (1 + 1/(8t)) beyond T_MAX.
    let pi4 = 4.0 * std::f64::consts::PI;
    let tail = T_MAX.powf(-a) / a - (T_MAX.powf(-a - 1.0) / (a + 1.0) + T_MAX.powf(-a - 2.0) / (8.0 * (a + 2.0))) / pi4;
    a / gamma(1.0 - a) * (body + tail)
}

#[test]
fn one_dimensional_closed_form() {
    for alpha in [0.3, 0.5, 0.8] {
        let table = compute_green_table(1, alpha, 10, 256).unwrap();
        let k = k_alpha_1d(alpha);
        assert!((table.k_alpha() - k).abs() < 1e-9 * k, "alpha {alpha}: K {} vs {k}", table.k_alpha());
        let mut worst = 0.0f64;
        for z in -20..=20 {
            let exact = k * riesz_1d(alpha, z);
            let got = table.value(&[z]).unwrap();
            worst = worst.max((got - exact).abs() / exact);
            assert!((got - exact).abs() < 1e-6 * exact, "alpha {alpha} z {z}: {got} vs {exact}");
        }
        println!("alpha {alpha}: worst relative error {worst:e}, refinement delta {:e}", table.refinement_delta());
    }
}

#[test]
fn one_dimensional_closed_form_decays_as_a_power() {
    // G(z + a) / G(z + 1 - a) ~ z^(alpha - 1).
    let alpha = 0.5;
    let r = |z: i64| riesz_1d(alpha, z);
    let slope = (r(2000) / r(1000)).ln() / 2f64.ln();
    assert!((slope - (alpha - 1.0)).abs() < 1e-6);
}

#[test]
fn two_dimensional_heat_kernel_oracle() {
    let alpha = 1.0;
    let k = k_alpha_2d(alpha);
    assert!((compute_k_alpha(2, alpha, 256).unwrap() - k).abs() < 1e-7 * k);
    let table = compute_green_table(2, alpha, 6, 256).unwrap();
    for z in [[0, 0], [1, 0], [1, 1], [3, 0], [2, 5], [6, 6], [12, 0]] {
        let exact = k * riesz_2d_unnormalized(alpha, z);
        let got = table.value(&z).unwrap();
        assert!((got - exact).abs() < 1e-6 * exact, "z {z:?}: {got} vs {exact}");
    }
}

#[test]
fn k_alpha_even_order() {
    // mu = sum (2 - 2 cos k_i) averages to 2d.
    assert!((compute_k_alpha(3, 2.0, 96).unwrap() - 6.0).abs() < 1e-6 * 6.0);
    assert!((compute_k_alpha(1, 0.5, 256).unwrap() - k_alpha_1d(0.5)).abs() < 1e-9);
}
