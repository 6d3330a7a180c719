//! Excited-state amplitude: analytic residue sum and direct Volterra
//! integration, plus sampled trajectories with the free phase applied.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cubic::{amplitude_poles, numerator_shifts, CubicMode, CubicRoots};
use crate::error::{invalid, Error, Result};
use crate::params::DimensionlessParams;

/// Default Volterra step in units of `1/gamma`.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default tolerance on the halving-based error estimate.
pub const DEFAULT_VOLTERRA_TOL: f64 = 1e-7;
/// Extra halvings allowed when the estimate exceeds the tolerance.
pub const VOLTERRA_REFINEMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Analytic,
    Volterra,
    /// Analytic unless the poles are degenerate.
    Auto,
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Analytic => "analytic",
            Solver::Volterra => "volterra",
            Solver::Auto => "auto",
        }
    }
}

impl std::str::FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Solver::Analytic),
            "volterra" => Ok(Solver::Volterra),
            "auto" => Ok(Solver::Auto),
            other => Err(invalid("solver", format!("unknown solver `{other}`"))),
        }
    }
}

/// Picture in which the qubit coherence is expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Interaction picture: `A = Ã`.
    Rotating,
    /// Laboratory picture: `A = Ã e^{+i omega0 t}`.
    Lab,
}

impl Frame {
    pub fn phase_rate(&self, d: &DimensionlessParams) -> f64 {
        match self {
            Frame::Rotating => 0.0,
            Frame::Lab => d.y2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Frame::Rotating => "rotating",
            Frame::Lab => "lab",
        }
    }
}

impl std::str::FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rotating" => Ok(Frame::Rotating),
            "lab" => Ok(Frame::Lab),
            other => Err(invalid("frame", format!("unknown frame `{other}`"))),
        }
    }
}

/// `Ã(t) = sum_i r_i e^{q_i t}` with residues `r_i` of the transformed amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidueAmplitude {
    pub roots: CubicRoots,
    pub residues: [Complex64; 3],
}

impl ResidueAmplitude {
    pub fn new(roots: CubicRoots, shifts: (Complex64, Complex64)) -> Result<Self> {
        if roots.degenerate {
            return Err(Error::DegenerateRoots {
                min_distance: roots.min_distance,
            });
        }
        let [q1, q2, q3] = roots.roots;
        let num = |q: Complex64| (q + shifts.0) * (q + shifts.1);
        let residues = [
            num(q1) / ((q1 - q2) * (q1 - q3)),
            -num(q2) / ((q1 - q2) * (q2 - q3)),
            num(q3) / ((q1 - q3) * (q2 - q3)),
        ];
        Ok(Self { roots, residues })
    }

    /// Laplace-derived poles and numerator for `d`.
    pub fn for_params(d: &DimensionlessParams) -> Result<Self> {
        Self::new(
            amplitude_poles(d, CubicMode::Laplace),
            numerator_shifts(d, CubicMode::Laplace),
        )
    }

    pub fn value(&self, t: f64) -> Complex64 {
        self.eval(t).0
    }

    /// `(Ã(t), Ã'(t))`.
    pub fn eval(&self, t: f64) -> (Complex64, Complex64) {
        let mut a = Complex64::new(0.0, 0.0);
        let mut da = Complex64::new(0.0, 0.0);
        for (r, q) in self.residues.iter().zip(self.roots.roots) {
            let term = r * (q * t).exp();
            a += term;
            da += term * q;
        }
        (a, da)
    }
}

/// Residue-sum amplitude `Ã(t)` for the given poles.
pub fn amplitude_analytic(t: f64, roots: &CubicRoots, d: &DimensionlessParams) -> Result<Complex64> {
    let model = ResidueAmplitude::new(*roots, numerator_shifts(d, CubicMode::Laplace))?;
    Ok(model.value(t))
}

/// Uniformly sampled amplitude on `t_grid[i] = i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeTrajectory {
    pub step: f64,
    pub t_grid: Vec<f64>,
    /// Slowly varying amplitude `Ã`.
    pub a_tilde: Vec<Complex64>,
    /// `dÃ/dt`.
    pub a_tilde_dot: Vec<Complex64>,
    /// Phase-dressed amplitude `A = Ã e^{i phase_rate t}`.
    pub a_full: Vec<Complex64>,
    /// `dA/dt`.
    pub a_dot: Vec<Complex64>,
    pub phase_rate: f64,
    pub solver: Solver,
    pub est_error: f64,
    exact: Option<ResidueAmplitude>,
}

impl AmplitudeTrajectory {
    fn from_slow(
        step: f64,
        a_tilde: Vec<Complex64>,
        a_tilde_dot: Vec<Complex64>,
        solver: Solver,
        est_error: f64,
        exact: Option<ResidueAmplitude>,
    ) -> Self {
        let t_grid = (0..a_tilde.len()).map(|i| i as f64 * step).collect();
        let mut traj = Self {
            step,
            t_grid,
            a_full: a_tilde.clone(),
            a_dot: a_tilde_dot.clone(),
            a_tilde,
            a_tilde_dot,
            phase_rate: 0.0,
            solver,
            est_error,
            exact,
        };
        traj.apply_phase(0.0);
        traj
    }

    fn apply_phase(&mut self, rate: f64) {
        self.phase_rate = rate;
        for i in 0..self.a_tilde.len() {
            let (a, da) = dress(self.a_tilde[i], self.a_tilde_dot[i], rate, self.t_grid[i]);
            self.a_full[i] = a;
            self.a_dot[i] = da;
        }
    }

    /// Same trajectory with `A = Ã e^{i rate t}`.
    pub fn with_phase_rate(mut self, rate: f64) -> Self {
        self.apply_phase(rate);
        self
    }

    pub fn with_frame(self, frame: Frame, d: &DimensionlessParams) -> Self {
        self.with_phase_rate(frame.phase_rate(d))
    }

    pub fn t_max(&self) -> f64 {
        *self.t_grid.last().unwrap_or(&0.0)
    }

    pub fn len(&self) -> usize {
        self.a_tilde.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a_tilde.is_empty()
    }

    /// `(Ã(t), Ã'(t))` at an arbitrary time: exact for analytic trajectories,
    /// cubic Hermite interpolation otherwise.
    pub fn slow_at(&self, t: f64) -> Result<(Complex64, Complex64)> {
        let t_max = self.t_max();
        if !(t >= 0.0 && t <= t_max * (1.0 + 1e-12)) {
            return Err(Error::OutOfRange { t, t_max });
        }
        if let Some(exact) = &self.exact {
            return Ok(exact.eval(t));
        }
        let n = self.len() - 1;
        let i = ((t / self.step) as usize).min(n.saturating_sub(1));
        let h = self.step;
        let u = ((t - self.t_grid[i]) / h).clamp(0.0, 1.0);
        let (y0, y1) = (self.a_tilde[i], self.a_tilde[i + 1]);
        let (m0, m1) = (self.a_tilde_dot[i] * h, self.a_tilde_dot[i + 1] * h);
        let (u2, u3) = (u * u, u * u * u);
        let value = y0 * (2.0 * u3 - 3.0 * u2 + 1.0)
            + m0 * (u3 - 2.0 * u2 + u)
            + y1 * (-2.0 * u3 + 3.0 * u2)
            + m1 * (u3 - u2);
        let deriv = (y0 * (6.0 * u2 - 6.0 * u)
            + m0 * (3.0 * u2 - 4.0 * u + 1.0)
            + y1 * (-6.0 * u2 + 6.0 * u)
            + m1 * (3.0 * u2 - 2.0 * u))
            / h;
        Ok((value, deriv))
    }

    /// `(A(t), dA/dt)` at an arbitrary time.
    pub fn full_at(&self, t: f64) -> Result<(Complex64, Complex64)> {
        let (a, da) = self.slow_at(t)?;
        Ok(dress(a, da, self.phase_rate, t))
    }
}

/// Applies `e^{i rate t}` to an amplitude and its derivative.
pub fn dress(a: Complex64, da: Complex64, rate: f64, t: f64) -> (Complex64, Complex64) {
    if rate == 0.0 {
        return (a, da);
    }
    let phase = Complex64::from_polar(1.0, rate * t);
    (a * phase, (da + Complex64::new(0.0, rate) * a) * phase)
}

/// Populates `a_full` and `a_dot` with the convention `A = Ã e^{+i omega0 t}`.
pub fn amplitude_full(traj: AmplitudeTrajectory, d: &DimensionlessParams) -> AmplitudeTrajectory {
    traj.with_phase_rate(d.y2)
}

fn check_grid(t_max: f64, h: f64) -> Result<usize> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(invalid("t_max", format!("must be > 0, got {t_max}")));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid("h", format!("must be > 0, got {h}")));
    }
    let n = (t_max / h - 1e-9).ceil().max(1.0);
    if n > 5e8 {
        return Err(invalid("h", format!("grid of {n} steps is too large")));
    }
    Ok(n as usize)
}

/// Residue-sum trajectory sampled on a grid of step `h`.
pub fn trajectory_analytic(d: &DimensionlessParams, t_max: f64, h: f64) -> Result<AmplitudeTrajectory> {
    let n = check_grid(t_max, h)?;
    let model = ResidueAmplitude::for_params(d)?;
    let (a, da): (Vec<_>, Vec<_>) = (0..=n).map(|i| model.eval(i as f64 * h)).unzip();
    Ok(AmplitudeTrajectory::from_slow(
        h,
        a,
        da,
        Solver::Analytic,
        model.roots.max_residual,
        Some(model),
    ))
}

/// `int_0^1 e^{-z u} u du` and `int_0^1 e^{-z u} (1 - u) du`.
fn panel_weights(z: Complex64) -> (Complex64, Complex64) {
    if z.norm() < 0.1 {
        let mut w_old = Complex64::new(0.0, 0.0);
        let mut w_new = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        for m in 0..16 {
            let mf = m as f64;
            w_old += term / (mf + 2.0);
            w_new += term / ((mf + 1.0) * (mf + 2.0));
            term *= -z / (mf + 1.0);
        }
        (w_old, w_new)
    } else {
        let e = (-z).exp();
        let z2 = z * z;
        ((1.0 - e * (1.0 + z)) / z2, (z - 1.0 + e) / z2)
    }
}

/// Product-trapezoidal integration of `Ã' = -int_0^t F(t - t') Ã(t') dt'`
/// with `Ã(0) = 1` on `n` steps of size `h`.
///
/// The kernel is the sum of two exponentials, so the history integral of a
/// piecewise-linear `Ã` against it is propagated exactly one step at a time.
fn volterra_run(d: &DimensionlessParams, n: usize, h: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let (r1, r2) = d.kernel_rates();
    let weight = d.y1 / 8.0;
    let modes: Vec<(Complex64, Complex64, Complex64)> = [r1, r2]
        .iter()
        .map(|&rate| {
            let z = rate * h;
            let (w_old, w_new) = panel_weights(z);
            ((-z).exp(), w_old * h, w_new * h)
        })
        .collect();
    let new_weight: Complex64 = modes.iter().map(|m| m.2).sum();
    let denom = 1.0 + 0.5 * h * weight * new_weight;

    let mut a = Vec::with_capacity(n + 1);
    let mut da = Vec::with_capacity(n + 1);
    let mut hist = [Complex64::new(0.0, 0.0); 2];
    a.push(Complex64::new(1.0, 0.0));
    da.push(Complex64::new(0.0, 0.0));
    for k in 0..n {
        let (ak, dak) = (a[k], da[k]);
        // Part of M_j(t_{k+1}) independent of the new sample.
        let mut carried = [Complex64::new(0.0, 0.0); 2];
        for (j, &(decay, w_old, _)) in modes.iter().enumerate() {
            carried[j] = decay * hist[j] + w_old * ak;
        }
        let known: Complex64 = carried.iter().sum();
        let next = (ak + 0.5 * h * dak - 0.5 * h * weight * known) / denom;
        for (j, &(_, _, w_new)) in modes.iter().enumerate() {
            hist[j] = carried[j] + w_new * next;
        }
        a.push(next);
        da.push(-weight * (hist[0] + hist[1]));
    }
    (a, da)
}

/// Direct Volterra solution on a grid of step `h` up to `t_max`.
///
/// Each attempt pairs a run at `h` with one at `h/2`; the returned samples are
/// the Richardson combination and `est_error = sup|Ã_{h/2} - Ã_h| / 3`. If the
/// estimate exceeds `tol` the step is halved again, up to
/// [`VOLTERRA_REFINEMENTS`] times.
pub fn amplitude_volterra(
    d: &DimensionlessParams,
    t_max: f64,
    h: f64,
    tol: f64,
) -> Result<AmplitudeTrajectory> {
    check_grid(t_max, h)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be > 0, got {tol}")));
    }
    let mut step = h;
    let mut estimate = f64::INFINITY;
    for _ in 0..=VOLTERRA_REFINEMENTS {
        let n = check_grid(t_max, step)?;
        let (coarse, coarse_d) = volterra_run(d, n, step);
        let (fine, fine_d) = volterra_run(d, 2 * n, 0.5 * step);
        estimate = 0.0;
        let mut a = Vec::with_capacity(n + 1);
        let mut da = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let diff = fine[2 * i] - coarse[i];
            estimate = f64::max(estimate, diff.norm() / 3.0);
            a.push(fine[2 * i] + diff / 3.0);
            da.push(fine_d[2 * i] + (fine_d[2 * i] - coarse_d[i]) / 3.0);
        }
        if estimate <= tol {
            return Ok(AmplitudeTrajectory::from_slow(step, a, da, Solver::Volterra, estimate, None));
        }
        step *= 0.5;
    }
    Err(Error::VolterraNonConvergence {
        estimate,
        tol,
        refinements: VOLTERRA_REFINEMENTS,
        h: step * 2.0,
    })
}

/// Builds a trajectory (rotating frame) with the requested solver. `Auto`
/// falls back to Volterra when the poles are degenerate.
pub fn solve_trajectory(
    d: &DimensionlessParams,
    t_max: f64,
    solver: Solver,
    h: f64,
    tol: f64,
) -> Result<AmplitudeTrajectory> {
    match solver {
        Solver::Analytic => trajectory_analytic(d, t_max, h),
        Solver::Volterra => amplitude_volterra(d, t_max, h, tol),
        Solver::Auto => match trajectory_analytic(d, t_max, h) {
            Err(Error::DegenerateRoots { .. }) => amplitude_volterra(d, t_max, h, tol),
            other => other,
        },
    }
}

/// `Ã(t)` for a static qubit without detuning, from the equivalent
/// second-order equation `Ã'' + y1 Ã' + (y1/4) Ã = 0`.
pub fn amplitude_static_closed(y1: f64, t: f64) -> Complex64 {
    let d = Complex64::new(y1 * y1 - y1, 0.0).sqrt();
    let x = d * t / 2.0;
    // (y1 / d) sinh(x) = (y1 t / 2) sinh(x) / x
    let sinhc = if x.norm() < 1e-4 { 1.0 + x * x / 6.0 } else { x.sinh() / x };
    (-y1 * t / 2.0).exp() * (x.cosh() + 0.5 * y1 * t * sinhc)
}
