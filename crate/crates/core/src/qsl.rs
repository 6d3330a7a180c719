//! Relative-purity speed limits (ML, MT and unified) along a trajectory,
//! plus the closed-system reference bound.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::amplitude::AmplitudeTrajectory;
use crate::dynamics::{
    density_derivative, density_matrix, derivative_singular_values, overlap, purity,
    state_singular_values, QubitState, MAX_COHERENT,
};
use crate::error::{invalid, Error, Result};
use crate::quad::simpson_samples;

/// Default number of Simpson panels for the time averages.
pub const DEFAULT_N_QUAD: usize = 256;

#[derive(Debug, Clone, Copy)]
pub struct QslInputs<'a> {
    pub traj: &'a AmplitudeTrajectory,
    pub tau: f64,
    pub tau_d: f64,
    pub n_quad: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QslResult {
    /// `|f(tau + tau_d) - 1| tr(rho_tau^2)`.
    pub numerator: f64,
    /// Window average of `sum_i kappa_i rho_i`.
    pub denom_ml: f64,
    /// Window average of `sqrt(sum_i kappa_i^2)`.
    pub denom_mt: f64,
    pub t_ml: f64,
    pub t_mt: f64,
    pub t_unified: f64,
}

/// `|tr(rho_tau rho_later) - tr(rho_tau^2)|`.
pub fn qsl_numerator(s_tau: &QubitState, s_later: &QubitState) -> f64 {
    (overlap(s_tau, s_later) - purity(s_tau)).abs()
}

/// Expanded scalar form of the numerator for the maximally coherent family,
/// divided by four to match the half-normalized density matrix.
/// `a_tau`, `a_later` are slow amplitudes and `k` the phase time.
pub fn qsl_numerator_expanded(a_tau: Complex64, a_later: Complex64, omega0: f64, k: f64) -> f64 {
    let x = a_tau.norm_sqr();
    let y = a_later.norm_sqr();
    let phase = Complex64::from_polar(1.0, -k * omega0);
    let cross = phase * a_later * a_tau.conj() + phase.conj() * a_later.conj() * a_tau;
    0.25 * (-2.0 * x * x + 2.0 * (x - 1.0) * y + cross.re).abs()
}

fn state_at(traj: &AmplitudeTrajectory, t: f64) -> Result<QubitState> {
    let (a, _) = traj.full_at(t)?;
    density_matrix(a, MAX_COHERENT.0, MAX_COHERENT.1)
}

fn kappa_at(traj: &AmplitudeTrajectory, t: f64) -> Result<f64> {
    let (a, da) = traj.full_at(t)?;
    let d = density_derivative(a, da, MAX_COHERENT.0, MAX_COHERENT.1)?;
    Ok(derivative_singular_values(&d).0)
}

/// ML, MT and unified QSL times for the window `[tau, tau + tau_d]`, starting
/// from the maximally coherent state. The state singular values are frozen at
/// `tau`; the derivative singular values are averaged over the window.
pub fn qsl_times(inputs: &QslInputs<'_>) -> Result<QslResult> {
    let QslInputs {
        traj,
        tau,
        tau_d,
        n_quad,
    } = *inputs;
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(invalid("tau", format!("must be >= 0, got {tau}")));
    }
    if !(tau_d > 0.0 && tau_d.is_finite()) {
        return Err(invalid("tau_d", format!("must be > 0, got {tau_d}")));
    }
    let end = tau + tau_d;
    if end > traj.t_max() * (1.0 + 1e-12) {
        return Err(Error::OutOfRange {
            t: end,
            t_max: traj.t_max(),
        });
    }

    let s_tau = state_at(traj, tau)?;
    let s_later = state_at(traj, end)?;
    let numerator = qsl_numerator(&s_tau, &s_later);
    let (r1, r2) = state_singular_values(&s_tau);

    if n_quad == 0 || n_quad % 2 != 0 {
        return Err(invalid("n_quad", format!("must be even and > 0, got {n_quad}")));
    }
    let h = tau_d / n_quad as f64;
    let kappas = (0..=n_quad)
        .map(|j| kappa_at(traj, (tau + j as f64 * h).min(end)))
        .collect::<Result<Vec<f64>>>()?;
    // kappa_1 = kappa_2 for a traceless Hermitian derivative
    let mean_kappa = simpson_samples(&kappas, h)? / tau_d;
    let denom_ml = mean_kappa * (r1 + r2);
    let denom_mt = (2.0f64).sqrt() * mean_kappa;
    if !(denom_ml > 0.0 && denom_mt > 0.0) {
        return Err(Error::ZeroDenominator { tau, tau_d });
    }
    let t_ml = numerator / denom_ml;
    let t_mt = numerator / denom_mt;
    Ok(QslResult {
        numerator,
        denom_ml,
        denom_mt,
        t_ml,
        t_mt,
        t_unified: t_ml.max(t_mt),
    })
}

/// `max(pi hbar / (2 dE), pi hbar / (2 E))`; a zero energy scale contributes
/// an infinite term, which is returned as `f64::INFINITY`.
pub fn closed_system_qsl(mean_energy: f64, energy_spread: f64, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) {
        return Err(invalid("hbar", format!("must be > 0, got {hbar}")));
    }
    if !(mean_energy >= 0.0 && energy_spread >= 0.0) {
        return Err(invalid("energy", "energy scales must be >= 0"));
    }
    if mean_energy == 0.0 && energy_spread == 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let bound = |e: f64| {
        if e == 0.0 {
            f64::INFINITY
        } else {
            PI * hbar / (2.0 * e)
        }
    };
    Ok(bound(energy_spread).max(bound(mean_energy)))
}
