//! Memory kernel of the amplitude equation.
//!
//! [`kernel_closed`] is the continuum-limit closed form; the spectral
//! quadrature in [`kernel_quadrature_oracle`] integrates the Lorentzian
//! spectral density directly and serves as its independent check.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::params::DimensionlessParams;
use crate::quad::{integrate_adaptive, QuadOutcome};

/// Half-width of the integrated frequency window, in units of the spectral width.
pub const SPECTRAL_WINDOW: f64 = 1e5;

const MAX_BISECTIONS: usize = 400_000;

/// `F(s) = (gamma lambda / 4) cosh(theta s) e^{-lambda_bar s}` for elapsed
/// time `s >= 0` (units of gamma = 1).
pub fn kernel_closed(s: f64, d: &DimensionlessParams) -> Complex64 {
    0.25 * d.y1 * (d.theta * s).cosh() * (-d.lambda_bar * s).exp()
}

/// Lorentzian spectral density at frequency offset `x = omega - omega_n`.
pub fn spectral_density(x: f64, d: &DimensionlessParams) -> f64 {
    let l = d.y1;
    l * l / (2.0 * PI * (x * x + l * l))
}

/// Integrand of the continuum kernel in the offset variable `x`:
/// `J(omega) * cos(omega beta s) / 2 * e^{-i (omega - omega0) s}`.
fn spectral_integrand(x: f64, s: f64, d: &DimensionlessParams) -> Complex64 {
    let omega = d.omega_n() + x;
    let shape = 0.5 * (omega * d.beta * s).cos();
    // omega - omega0 = x - y3
    let carrier = Complex64::from_polar(1.0, -(x - d.y3) * s);
    carrier * (spectral_density(x, d) * shape)
}

/// Panel boundaries on `[lo, hi]` (offset coordinates) that resolve both the
/// Lorentzian peak at `x = 0` and the carrier oscillation of period `2 pi / s`.
fn partition(lo: f64, hi: f64, s: f64, width: f64) -> Vec<f64> {
    let period = if s > 0.0 { 2.0 * PI / s } else { f64::INFINITY };
    let step = |x: f64| period.min(0.5 * width.max(x.abs()));

    let mut right = Vec::new();
    let mut x = lo.max(0.0);
    if x < hi {
        right.push(x);
        while x < hi {
            x = (x + step(x)).min(hi);
            right.push(x);
        }
    }
    let mut left = Vec::new();
    let mut x = hi.min(0.0);
    if x > lo {
        left.push(x);
        while x > lo {
            x = (x - step(x)).max(lo);
            left.push(x);
        }
    }
    left.reverse();
    if let (Some(&l), Some(&r)) = (left.last(), right.first()) {
        if l == r {
            left.pop();
        }
    }
    left.extend(right);
    left
}

/// Integrates the spectral kernel integrand over `omega - omega_n` in
/// `[lo, hi]` to absolute tolerance `tol`.
pub fn spectral_integral(
    s: f64,
    d: &DimensionlessParams,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<QuadOutcome> {
    if !(hi > lo) {
        return Err(invalid("interval", format!("need lo < hi, got [{lo}, {hi}]")));
    }
    let bps = partition(lo, hi, s, d.y1);
    integrate_adaptive(|x| spectral_integrand(x, s, d), &bps, tol, MAX_BISECTIONS)
}

/// Quadrature of the continuum-limit kernel between times `t > t_prime >= 0`,
/// over `omega` in `[max(0, omega_n - W lambda), omega_n + W lambda]` with
/// `W = SPECTRAL_WINDOW`.
pub fn kernel_quadrature_oracle(
    t: f64,
    t_prime: f64,
    d: &DimensionlessParams,
    tol: f64,
) -> Result<Complex64> {
    if !(t > t_prime && t_prime >= 0.0) {
        return Err(invalid(
            "t",
            format!("need t > t' >= 0, got t = {t}, t' = {t_prime}"),
        ));
    }
    let half = SPECTRAL_WINDOW * d.y1;
    let lo = (-d.omega_n()).max(-half);
    Ok(spectral_integral(t - t_prime, d, lo, half, tol)?.value)
}
