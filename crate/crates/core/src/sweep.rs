//! Parameter sweeps over velocity and initial time, and the flat
//! `key = value` configuration format that describes them.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplitude::{solve_trajectory, AmplitudeTrajectory, Frame, Solver, DEFAULT_STEP, DEFAULT_VOLTERRA_TOL};
use crate::dynamics::{density_matrix, purity, MAX_COHERENT};
use crate::error::{invalid, Error, Result};
use crate::params::{beta_from_scale, DimensionlessParams};
use crate::qsl::{qsl_times, QslInputs, DEFAULT_N_QUAD};

/// `omega0 / gamma` used by the figure presets.
pub const PRESET_Y2: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Weak coupling, `lambda = 3 gamma`.
    Fig2,
    /// Strong coupling, `lambda = 0.01 gamma`.
    Fig3,
    Custom,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Custom => "custom",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Preset::Fig2),
            "fig3" => Ok(Preset::Fig3),
            "custom" => Ok(Preset::Custom),
            other => Err(invalid("preset", format!("unknown preset `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub preset: Preset,
    /// Velocity ratios `v/c`.
    pub beta_values: Vec<f64>,
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_count: usize,
    pub tau_d: f64,
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
    pub solver: Solver,
    pub volterra_h: f64,
    pub volterra_tol: f64,
    pub n_quad: usize,
    pub frame: Frame,
}

impl SweepSpec {
    pub fn preset(preset: Preset) -> Self {
        let (y1, scales, tau_stop): (f64, &[f64], f64) = match preset {
            Preset::Fig2 | Preset::Custom => (3.0, &[15.0, 50.0, 70.0, 100.0], 20.0),
            Preset::Fig3 => (0.01, &[0.05, 0.1, 0.3, 0.5], 50.0),
        };
        Self {
            preset,
            beta_values: scales.iter().map(|&x| beta_from_scale(x)).collect(),
            tau_start: 0.0,
            tau_stop,
            tau_count: 400,
            tau_d: 1.0,
            y1,
            y2: PRESET_Y2,
            y3: 0.0,
            solver: Solver::Auto,
            volterra_h: DEFAULT_STEP,
            volterra_tol: DEFAULT_VOLTERRA_TOL,
            n_quad: DEFAULT_N_QUAD,
            frame: Frame::Rotating,
        }
    }

    pub fn fig2() -> Self {
        Self::preset(Preset::Fig2)
    }

    pub fn fig3() -> Self {
        Self::preset(Preset::Fig3)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_values.is_empty() {
            return Err(invalid("beta_values", "at least one velocity is required"));
        }
        for &b in &self.beta_values {
            DimensionlessParams::new(self.y1, self.y2, self.y3, b)?;
        }
        if self.tau_count == 0 {
            return Err(invalid("tau_count", "must be >= 1"));
        }
        if !(self.tau_start >= 0.0 && self.tau_start.is_finite()) {
            return Err(invalid("tau_start", format!("must be >= 0, got {}", self.tau_start)));
        }
        if self.tau_count >= 2 && !(self.tau_stop > self.tau_start && self.tau_stop.is_finite()) {
            return Err(invalid("tau_stop", "must exceed tau_start"));
        }
        if !(self.tau_d > 0.0 && self.tau_d.is_finite()) {
            return Err(invalid("tau_d", format!("must be > 0, got {}", self.tau_d)));
        }
        if !(self.volterra_h > 0.0) {
            return Err(invalid("h", format!("must be > 0, got {}", self.volterra_h)));
        }
        if !(self.volterra_tol > 0.0) {
            return Err(invalid("volterra_tol", format!("must be > 0, got {}", self.volterra_tol)));
        }
        if self.n_quad == 0 || !self.n_quad.is_multiple_of(2) {
            return Err(invalid("n_quad", format!("must be even and > 0, got {}", self.n_quad)));
        }
        Ok(())
    }

    pub fn tau_grid(&self) -> Vec<f64> {
        if self.tau_count == 1 {
            return vec![self.tau_start];
        }
        let step = (self.tau_stop - self.tau_start) / (self.tau_count - 1) as f64;
        (0..self.tau_count)
            .map(|i| {
                if i + 1 == self.tau_count {
                    self.tau_stop
                } else {
                    self.tau_start + i as f64 * step
                }
            })
            .collect()
    }

    pub fn params(&self, beta: f64) -> Result<DimensionlessParams> {
        DimensionlessParams::new(self.y1, self.y2, self.y3, beta)
    }

    /// Serializes every field in the config format.
    pub fn to_config_string(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ");
        let mut out = String::new();
        let _ = writeln!(out, "# leaky-qsl sweep");
        let _ = writeln!(out, "preset = {}", self.preset.name());
        let _ = writeln!(out, "beta = {}", list(&self.beta_values));
        let _ = writeln!(out, "tau_start = {}", self.tau_start);
        let _ = writeln!(out, "tau_stop = {}", self.tau_stop);
        let _ = writeln!(out, "tau_count = {}", self.tau_count);
        let _ = writeln!(out, "tau_d = {}", self.tau_d);
        let _ = writeln!(out, "y1 = {}", self.y1);
        let _ = writeln!(out, "y2 = {}", self.y2);
        let _ = writeln!(out, "y3 = {}", self.y3);
        let _ = writeln!(out, "solver = {}", self.solver.name());
        let _ = writeln!(out, "h = {}", self.volterra_h);
        let _ = writeln!(out, "volterra_tol = {}", self.volterra_tol);
        let _ = writeln!(out, "n_quad = {}", self.n_quad);
        let _ = writeln!(out, "frame = {}", self.frame.name());
        out
    }

    /// Parses the config format. A `preset` key (wherever it appears) selects
    /// the defaults; the remaining keys override them.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let entries = parse_config(text)?;
        let preset = match entries.iter().find(|(_, k, _)| k == "preset") {
            Some((line, _, v)) => v.parse().map_err(|e: Error| Error::Config {
                line: *line,
                message: e.to_string(),
            })?,
            None => Preset::Custom,
        };
        let mut spec = Self::preset(preset);
        spec.overlay_config(text)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Applies every key of a config text except `preset`, without validating.
    pub fn overlay_config(&mut self, text: &str) -> Result<()> {
        for (line, key, value) in parse_config(text)? {
            if key == "preset" {
                continue;
            }
            self.apply(&key, &value).map_err(|e| Error::Config {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    /// Sets one field from its config key.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T> {
            v.parse().map_err(|_| invalid(key, format!("cannot parse `{v}`")))
        }
        fn list(key: &'static str, v: &str) -> Result<Vec<f64>> {
            v.split(',').map(|x| num(key, x.trim())).collect()
        }
        match key {
            "preset" => self.preset = value.parse()?,
            "beta" => self.beta_values = list("beta", value)?,
            "beta_x" => {
                self.beta_values = list("beta_x", value)?.into_iter().map(beta_from_scale).collect()
            }
            "tau_start" => self.tau_start = num("tau_start", value)?,
            "tau_stop" => self.tau_stop = num("tau_stop", value)?,
            "tau_count" => self.tau_count = num("tau_count", value)?,
            "tau_d" => self.tau_d = num("tau_d", value)?,
            "y1" => self.y1 = num("y1", value)?,
            "y2" => self.y2 = num("y2", value)?,
            "y3" => self.y3 = num("y3", value)?,
            "solver" => self.solver = value.parse()?,
            "h" => self.volterra_h = num("h", value)?,
            "volterra_tol" => self.volterra_tol = num("volterra_tol", value)?,
            "n_quad" => self.n_quad = num("n_quad", value)?,
            "frame" => self.frame = value.parse()?,
            other => return Err(invalid("key", format!("unknown config key `{other}`"))),
        }
        Ok(())
    }
}

fn parse_config(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: idx + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        entries.push((idx + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

/// One CSV record of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRow {
    pub tau: f64,
    pub beta: f64,
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
    pub tau_d: f64,
    pub abs_a: f64,
    pub purity: f64,
    pub qsl_ml: f64,
    pub qsl_mt: f64,
    pub qsl_unified: f64,
    pub solver_used: String,
    pub est_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointFailure {
    pub beta: f64,
    pub tau: f64,
    pub error: Error,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepOutcome {
    /// Successful points, beta outer and tau inner.
    pub rows: Vec<OutputRow>,
    pub failures: Vec<PointFailure>,
}

impl SweepOutcome {
    pub fn is_complete(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Trajectory for one velocity covering the whole grid plus the driving window.
pub fn sweep_trajectory(spec: &SweepSpec, beta: f64) -> Result<AmplitudeTrajectory> {
    let d = spec.params(beta)?;
    let t_max = spec.tau_grid().last().copied().unwrap_or(0.0) + spec.tau_d;
    let traj = solve_trajectory(&d, t_max, spec.solver, spec.volterra_h, spec.volterra_tol)?;
    Ok(traj.with_frame(spec.frame, &d))
}

fn evaluate_point(spec: &SweepSpec, beta: f64, traj: &AmplitudeTrajectory, tau: f64) -> Result<OutputRow> {
    let r = qsl_times(&QslInputs {
        traj,
        tau,
        tau_d: spec.tau_d,
        n_quad: spec.n_quad,
    })?;
    let (a, _) = traj.full_at(tau)?;
    let state = density_matrix(a, MAX_COHERENT.0, MAX_COHERENT.1)?;
    Ok(OutputRow {
        tau,
        beta,
        y1: spec.y1,
        y2: spec.y2,
        y3: spec.y3,
        tau_d: spec.tau_d,
        abs_a: traj.slow_at(tau)?.0.norm(),
        purity: purity(&state),
        qsl_ml: r.t_ml,
        qsl_mt: r.t_mt,
        qsl_unified: r.t_unified,
        solver_used: traj.solver.name().to_string(),
        est_error: traj.est_error,
    })
}

/// Evaluates every `(beta, tau)` point on a pool of `threads` workers
/// (`1` runs serially). Failures are collected per point and do not stop the
/// remaining points; output order is independent of the worker count.
pub fn run_sweep(spec: &SweepSpec, threads: usize) -> Result<SweepOutcome> {
    spec.validate()?;
    let taus = spec.tau_grid();
    let work = || -> Vec<std::result::Result<OutputRow, PointFailure>> {
        let trajectories: Vec<Result<AmplitudeTrajectory>> = if threads == 1 {
            spec.beta_values.iter().map(|&b| sweep_trajectory(spec, b)).collect()
        } else {
            spec.beta_values.par_iter().map(|&b| sweep_trajectory(spec, b)).collect()
        };
        let points: Vec<(usize, f64)> = (0..spec.beta_values.len())
            .flat_map(|bi| taus.iter().map(move |&t| (bi, t)))
            .collect();
        let eval = |&(bi, tau): &(usize, f64)| {
            let beta = spec.beta_values[bi];
            let fail = |error| PointFailure { beta, tau, error };
            match &trajectories[bi] {
                Ok(traj) => evaluate_point(spec, beta, traj, tau).map_err(fail),
                Err(e) => Err(fail(e.clone())),
            }
        };
        if threads == 1 {
            points.iter().map(eval).collect()
        } else {
            points.par_iter().map(eval).collect()
        }
    };
    let results = if threads == 1 {
        work()
    } else {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if threads > 0 {
            builder = builder.num_threads(threads);
        }
        let pool = builder
            .build()
            .map_err(|e| invalid("threads", e.to_string()))?;
        pool.install(work)
    };
    let mut outcome = SweepOutcome::default();
    for r in results {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(f) => outcome.failures.push(f),
        }
    }
    Ok(outcome)
}
