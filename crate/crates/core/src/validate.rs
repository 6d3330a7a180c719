//! Built-in cross-checks between the closed forms and their numerical oracles.

use std::fmt;

use num_complex::Complex64;

use crate::amplitude::{amplitude_static_closed, solve_trajectory, Solver, DEFAULT_STEP};
use crate::cubic::{cubic_coefficients, CubicMode};
use crate::dynamics::{
    density_derivative, density_matrix, derivative_singular_values, kappa_expanded,
    singular_values_2x2, state_singular_values_closed, KappaReading, MAX_COHERENT,
};
use crate::error::{invalid, Result};
use crate::kernel::{kernel_closed, kernel_quadrature_oracle};
use crate::params::DimensionlessParams;
use crate::qsl::{qsl_numerator, qsl_numerator_expanded};
use crate::sweep::{run_sweep, SweepSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct Tolerances {
    /// Relative kernel error against quadrature.
    pub kernel: f64,
    /// Sup-norm error against the static closed form.
    pub static_limit: f64,
    /// Sup-norm distance between the analytic and Volterra amplitudes.
    pub solver_agreement: f64,
    pub state_singular: f64,
    /// Relative error of the expanded coherence-rate form.
    pub kappa: f64,
    pub numerator: f64,
    /// Allowed amount by which `t_ml` may fall below `t_mt`.
    pub ordering: f64,
    /// Allowed amount by which `t_unified` may exceed `tau_d`.
    pub validity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            kernel: 1e-4,
            static_limit: 1e-8,
            solver_agreement: 1e-5,
            state_singular: 1e-10,
            kappa: 1e-10,
            numerator: 1e-10,
            ordering: 1e-12,
            validity: 1e-9,
        }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 8] = [
        "kernel",
        "static_limit",
        "solver_agreement",
        "state_singular",
        "kappa",
        "numerator",
        "ordering",
        "validity",
    ];

    pub fn uniform(v: f64) -> Self {
        Self {
            kernel: v,
            static_limit: v,
            solver_agreement: v,
            state_singular: v,
            kappa: v,
            numerator: v,
            ordering: v,
            validity: v,
        }
    }

    pub fn set(&mut self, name: &str, v: f64) -> Result<()> {
        if !(v >= 0.0) {
            return Err(invalid("tolerance", format!("must be >= 0, got {v}")));
        }
        let slot = match name {
            "kernel" => &mut self.kernel,
            "static_limit" => &mut self.static_limit,
            "solver_agreement" => &mut self.solver_agreement,
            "state_singular" => &mut self.state_singular,
            "kappa" => &mut self.kappa,
            "numerator" => &mut self.numerator,
            "ordering" => &mut self.ordering,
            "validity" => &mut self.validity,
            other => return Err(invalid("tolerance", format!("unknown check `{other}`"))),
        };
        *slot = v;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Measured error (or violation); compared as `measured <= tolerance`.
    pub measured: f64,
    pub tolerance: f64,
    pub informational: bool,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            informational: false,
            passed: measured <= tolerance,
            detail,
        }
    }

    fn info(name: &str, measured: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance: f64::NAN,
            informational: true,
            passed: true,
            detail,
        }
    }

    fn failed(name: &str, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            measured: f64::INFINITY,
            tolerance,
            informational: false,
            passed: false,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.informational {
            "INFO"
        } else if self.passed {
            "PASS"
        } else {
            "FAIL"
        };
        if self.informational {
            write!(f, "{tag} {:<22} measured={:.3e}  {}", self.name, self.measured, self.detail)
        } else {
            write!(
                f,
                "{tag} {:<22} measured={:.3e} tol={:.1e}  {}",
                self.name, self.measured, self.tolerance, self.detail
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.informational || c.passed)
    }

    /// Process exit code: 0 when every required check passes, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            3
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let required = self.checks.iter().filter(|c| !c.informational).count();
        let ok = self.checks.iter().filter(|c| !c.informational && c.passed).count();
        writeln!(f, "{ok}/{required} required checks passed")
    }
}

fn presets() -> [SweepSpec; 2] {
    [SweepSpec::fig2(), SweepSpec::fig3()]
}

fn check_kernel(tol: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for spec in presets() {
        for &beta in &spec.beta_values {
            let d = spec.params(beta)?;
            for frac in [0.05, 0.3, 1.0] {
                let s = frac * 5.0 / d.y1;
                let closed = kernel_closed(s, &d);
                let quad = kernel_quadrature_oracle(s, 0.0, &d, 1e-9 * closed.norm())?;
                worst = worst.max((closed - quad).norm() / closed.norm());
                n += 1;
            }
        }
    }
    Ok(Check::new("kernel_oracle", worst, tol, format!("{n} samples, both presets")))
}

fn check_cubic_modes() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for spec in presets() {
        for &beta in &spec.beta_values {
            let d = spec.params(beta)?;
            let a = cubic_coefficients(&d, CubicMode::Substituted);
            let b = cubic_coefficients(&d, CubicMode::Laplace);
            worst = worst.max(a.max_difference(&b));
        }
    }
    Ok(Check::info(
        "cubic_mode_difference",
        worst,
        "max coefficient gap, substituted vs Laplace".into(),
    ))
}

fn sup_distance(d: &DimensionlessParams, t_max: f64, vol_tol: f64) -> Result<f64> {
    let a = solve_trajectory(d, t_max, Solver::Analytic, DEFAULT_STEP, vol_tol)?;
    let v = solve_trajectory(d, t_max, Solver::Volterra, DEFAULT_STEP, vol_tol)?;
    let mut worst: f64 = 0.0;
    for (t, x) in v.t_grid.iter().zip(&v.a_tilde) {
        worst = worst.max((a.slow_at(*t)?.0 - x).norm());
    }
    Ok(worst)
}

fn check_solvers(tol: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for spec in presets() {
        for &beta in &spec.beta_values {
            worst = worst.max(sup_distance(&spec.params(beta)?, 10.0, 1e-8)?);
        }
    }
    Ok(Check::new("analytic_vs_volterra", worst, tol, "t in [0, 10], both presets".into()))
}

fn check_static(tol: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for y1 in [3.0, 0.01, 100.0] {
        let d = DimensionlessParams::new(y1, 1e9, 0.0, 0.0)?;
        for solver in [Solver::Analytic, Solver::Volterra] {
            let traj = solve_trajectory(&d, 10.0, solver, DEFAULT_STEP, 1e-10)?;
            for (t, a) in traj.t_grid.iter().zip(&traj.a_tilde) {
                worst = worst.max((a - amplitude_static_closed(y1, *t)).norm());
            }
        }
    }
    Ok(Check::new("static_limit", worst, tol, "y1 in {3, 0.01, 100}, both solvers".into()))
}

fn check_state_singular(tol: f64) -> Result<Check> {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let r = k as f64 / 99.0;
        let a = Complex64::from_polar(r, 0.37 * k as f64);
        let s = density_matrix(a, MAX_COHERENT.0, MAX_COHERENT.1)?;
        let (lo, hi) = singular_values_2x2(&s.matrix());
        let (clo, chi) = state_singular_values_closed(r);
        worst = worst.max((lo - clo).abs()).max((hi - chi).abs());
    }
    Ok(Check::new("state_singular_closed", worst, tol, "100 samples of |A| in [0, 1]".into()))
}

/// Trajectory in the `A = Ã e^{-i y2 t}` convention.
fn conjugate_trajectory(d: &DimensionlessParams, t_max: f64) -> Result<crate::AmplitudeTrajectory> {
    let traj = solve_trajectory(d, t_max, Solver::Analytic, DEFAULT_STEP, 1e-8)?;
    Ok(traj.with_phase_rate(-d.y2))
}

/// The fig2 velocity `50e-9` at the preset frequency, and a low-frequency set
/// where every term of the expanded form matters.
fn cross_check_params() -> Result<[DimensionlessParams; 2]> {
    Ok([
        SweepSpec::fig2().params(50e-9)?,
        DimensionlessParams::new(3.0, 5.0, 0.5, 0.05)?,
    ])
}

fn check_kappa(tol: f64) -> Result<(Check, Check)> {
    let (mut real, mut literal): (f64, f64) = (0.0, 0.0);
    for d in cross_check_params()? {
        let traj = conjugate_trajectory(&d, 5.0)?;
        for k in 0..200 {
            let t = 5.0 * k as f64 / 199.0;
            let (a, da) = traj.slow_at(t)?;
            let (full, full_dot) = traj.full_at(t)?;
            let exact = derivative_singular_values(&density_derivative(
                full,
                full_dot,
                MAX_COHERENT.0,
                MAX_COHERENT.1,
            )?)
            .0;
            let rel = |x: f64| (x - exact).abs() / exact.max(f64::MIN_POSITIVE);
            real = real.max(rel(kappa_expanded(a, da, d.y2, KappaReading::RealPart)));
            literal = literal.max(rel(kappa_expanded(a, da, d.y2, KappaReading::Literal)));
        }
    }
    Ok((
        Check::new("kappa_expanded", real, tol, "real-part reading vs SVD, y2 in {1e9, 5}".into()),
        Check::info("kappa_expanded_literal", literal, "literal complex reading vs SVD".into()),
    ))
}

/// Uses `y2 = 1e3`: at `y2 = 1e9` the rounding of `y2 t` alone perturbs the
/// dressed phases by ~1e-6 rad.
fn check_numerator(tol: f64) -> Result<Check> {
    let tau_d = 1.0;
    let d = DimensionlessParams::new(3.0, 1e3, 0.0, 0.05)?;
    let traj = conjugate_trajectory(&d, 10.0 + tau_d)?;
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let tau = 10.0 * k as f64 / 99.0;
        let state = |t: f64| -> Result<_> {
            density_matrix(traj.full_at(t)?.0, MAX_COHERENT.0, MAX_COHERENT.1)
        };
        let matrix = qsl_numerator(&state(tau)?, &state(tau + tau_d)?);
        let expanded = qsl_numerator_expanded(traj.slow_at(tau)?.0, traj.slow_at(tau + tau_d)?.0, d.y2, tau_d);
        worst = worst.max((matrix - expanded).abs());
    }
    Ok(Check::new("numerator_expanded", worst, tol, "100 initial times, tau_d = 1".into()))
}

fn check_bounds(tol: &Tolerances, threads: usize) -> Result<(Check, Check)> {
    let mut ordering: f64 = f64::NEG_INFINITY;
    let mut validity: f64 = f64::NEG_INFINITY;
    let mut points = 0;
    let mut failures = 0;
    for spec in presets() {
        let out = run_sweep(&spec, threads)?;
        failures += out.failures.len();
        for r in &out.rows {
            ordering = ordering.max(r.qsl_mt - r.qsl_ml);
            validity = validity.max(r.qsl_unified - r.tau_d);
            points += 1;
        }
    }
    let detail = format!("{points} sweep points, {failures} failed");
    let mut a = Check::new("ml_ge_mt", ordering, tol.ordering, detail.clone());
    let mut b = Check::new("unified_le_tau_d", validity, tol.validity, detail);
    if failures > 0 {
        a.passed = false;
        b.passed = false;
    }
    Ok((a, b))
}

fn guard(name: &str, tolerance: f64, r: Result<Check>) -> Check {
    r.unwrap_or_else(|e| Check::failed(name, tolerance, e.to_string()))
}

/// Runs every check. Errors become failed checks rather than aborting the run.
pub fn validate(tol: &Tolerances, threads: usize) -> ValidationReport {
    let mut checks = vec![
        guard("kernel_oracle", tol.kernel, check_kernel(tol.kernel)),
        guard("cubic_mode_difference", f64::NAN, check_cubic_modes()),
        guard("analytic_vs_volterra", tol.solver_agreement, check_solvers(tol.solver_agreement)),
        guard("static_limit", tol.static_limit, check_static(tol.static_limit)),
        guard("state_singular_closed", tol.state_singular, check_state_singular(tol.state_singular)),
    ];
    match check_kappa(tol.kappa) {
        Ok((a, b)) => checks.extend([a, b]),
        Err(e) => checks.push(Check::failed("kappa_expanded", tol.kappa, e.to_string())),
    }
    checks.push(guard("numerator_expanded", tol.numerator, check_numerator(tol.numerator)));
    match check_bounds(tol, threads) {
        Ok((a, b)) => checks.extend([a, b]),
        Err(e) => checks.push(Check::failed("ml_ge_mt", tol.ordering, e.to_string())),
    }
    ValidationReport { checks }
}
