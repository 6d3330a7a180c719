//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use nalgebra::{Matrix2, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use leaky_qsl::amplitude::{amplitude_static_closed, solve_trajectory, Solver, DEFAULT_STEP};
use leaky_qsl::analysis::{column, dominance_fraction, group_by_beta, interior_extrema, max_increase};
use leaky_qsl::dynamics::{
    density_derivative, density_matrix, derivative_singular_values, singular_values_2x2,
    state_singular_values_closed, MAX_COHERENT,
};
use leaky_qsl::kernel::{kernel_closed, kernel_quadrature_oracle};
use leaky_qsl::output::rows_to_csv_string;
use leaky_qsl::qsl::qsl_numerator;
use leaky_qsl::sweep::{run_sweep, sweep_trajectory, OutputRow};
use leaky_qsl::{DimensionlessParams, SweepSpec};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn to_na(m: &[[Complex64; 2]; 2]) -> Matrix2<Complex64> {
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1])
}

fn presets() -> [SweepSpec; 2] {
    [SweepSpec::fig2(), SweepSpec::fig3()]
}

fn sweep_rows(spec: &SweepSpec) -> Result<Vec<OutputRow>, String> {
    let out = run_sweep(spec, 1).map_err(|e| e.to_string())?;
    if let Some(f) = out.failures.first() {
        return Err(format!("{} failed points, first at beta={:e} tau={}: {}", out.failures.len(), f.beta, f.tau, f.error));
    }
    Ok(out.rows)
}

fn kernel_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut sets: Vec<DimensionlessParams> = Vec::new();
    for spec in presets() {
        for &b in &spec.beta_values {
            sets.push(spec.params(b).unwrap());
        }
    }
    for _ in 0..20 {
        let y1 = 10f64.powf(rng.gen_range(-2.0..1.0));
        let y3 = rng.gen_range(-5.0..5.0);
        let beta = rng.gen_range(0.0..1e-7);
        sets.push(DimensionlessParams::new(y1, 1e9, y3, beta).unwrap());
    }
    let mut worst: f64 = 0.0;
    for d in &sets {
        for _ in 0..20 {
            let s = rng.gen_range(0.0..1.0f64).max(1e-12) * 5.0 / d.y1;
            let closed = kernel_closed(s, d);
            let quad = kernel_quadrature_oracle(s, 0.0, d, 1e-8 * closed.norm()).map_err(|e| e.to_string())?;
            worst = worst.max((closed - quad).norm() / closed.norm());
        }
    }
    let msg = format!("{} sets x 20 times, max rel err {worst:.2e} (< 1e-4)", sets.len());
    if worst < 1e-4 { Ok(msg) } else { Err(msg) }
}

fn static_limit() -> Outcome {
    let mut worst: f64 = 0.0;
    for y1 in [3.0, 0.01, 100.0] {
        let d = DimensionlessParams::new(y1, 1e9, 0.0, 0.0).unwrap();
        for solver in [Solver::Analytic, Solver::Volterra] {
            let traj = solve_trajectory(&d, 10.0, solver, DEFAULT_STEP, 1e-10).map_err(|e| e.to_string())?;
            for (t, a) in traj.t_grid.iter().zip(&traj.a_tilde) {
                worst = worst.max((a - amplitude_static_closed(y1, *t)).norm());
            }
        }
    }
    let msg = format!("y1 in {{3, 0.01, 100}}, both solvers, sup err {worst:.2e} (< 1e-8)");
    if worst < 1e-8 { Ok(msg) } else { Err(msg) }
}

fn solver_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in presets() {
        for &b in &spec.beta_values {
            let d = spec.params(b).unwrap();
            let a = solve_trajectory(&d, 10.0, Solver::Analytic, DEFAULT_STEP, 1e-8).map_err(|e| e.to_string())?;
            let v = solve_trajectory(&d, 10.0, Solver::Volterra, DEFAULT_STEP, 1e-8).map_err(|e| e.to_string())?;
            for (t, x) in v.t_grid.iter().zip(&v.a_tilde) {
                worst = worst.max((a.slow_at(*t).unwrap().0 - x).norm());
            }
        }
    }
    let msg = format!("8 preset series on [0, 10], sup distance {worst:.2e} (< 1e-5)");
    if worst < 1e-5 { Ok(msg) } else { Err(msg) }
}

fn markov_limit() -> Outcome {
    let d = DimensionlessParams::new(100.0, 1e9, 0.0, 0.0).unwrap();
    let mut worst: f64 = 0.0;
    for solver in [Solver::Analytic, Solver::Volterra] {
        let traj = solve_trajectory(&d, 4.0, solver, DEFAULT_STEP, 1e-8).map_err(|e| e.to_string())?;
        for (t, a) in traj.t_grid.iter().zip(&traj.a_tilde) {
            let want = (-t / 4.0).exp();
            worst = worst.max((a.norm() - want).abs() / want);
        }
    }
    let msg = format!("max relative deviation from e^(-t/4) {worst:.3} (< 0.05)");
    if worst < 0.05 { Ok(msg) } else { Err(msg) }
}

fn state_invariants() -> Outcome {
    let (mut trace_err, mut min_eig, mut max_abs): (f64, f64, f64) = (0.0, f64::INFINITY, 0.0);
    let mut n = 0usize;
    for spec in presets() {
        for &b in &spec.beta_values {
            let traj = sweep_trajectory(&spec, b).map_err(|e| e.to_string())?;
            for (a_full, a_tilde) in traj.a_full.iter().zip(&traj.a_tilde) {
                max_abs = max_abs.max(a_tilde.norm());
                let s = density_matrix(*a_full, MAX_COHERENT.0, MAX_COHERENT.1).map_err(|e| e.to_string())?;
                let m = to_na(&s.matrix());
                trace_err = trace_err.max((m.trace().re - 1.0).abs());
                let eig = SymmetricEigen::new(m).eigenvalues;
                min_eig = min_eig.min(eig.min());
                n += 1;
            }
        }
    }
    let ok = trace_err <= 1e-12 && min_eig >= -1e-9 && max_abs <= 1.0 + 1e-6;
    let msg = format!(
        "{n} samples: |tr-1| {trace_err:.1e}, min eigenvalue {min_eig:.3e}, max |A| {max_abs:.12}"
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn singular_values() -> Outcome {
    let mut closed_err: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let a = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        let s = density_matrix(a, MAX_COHERENT.0, MAX_COHERENT.1).unwrap();
        let (lo, hi) = singular_values_2x2(&s.matrix());
        let (clo, chi) = state_singular_values_closed(a.norm());
        closed_err = closed_err.max((lo - clo).abs()).max((hi - chi).abs());
    }
    let (mut gap, mut svd_err): (f64, f64) = (0.0, 0.0);
    let mut n = 0;
    for spec in presets() {
        for &b in &spec.beta_values {
            let traj = sweep_trajectory(&spec, b).map_err(|e| e.to_string())?;
            for i in (0..traj.len()).step_by(97) {
                let d = density_derivative(traj.a_full[i], traj.a_dot[i], MAX_COHERENT.0, MAX_COHERENT.1)
                    .map_err(|e| e.to_string())?;
                let (k1, k2) = derivative_singular_values(&d);
                let sv = to_na(&d.matrix()).singular_values();
                gap = gap.max((sv[0] - sv[1]).abs()).max((k1 - k2).abs());
                svd_err = svd_err.max((sv.max() - k1).abs()).max((sv.min() - k2).abs());
                n += 1;
            }
        }
    }
    let ok = closed_err <= 1e-10 && gap <= 1e-12 && svd_err <= 1e-12;
    let msg = format!(
        "closed form vs 2x2 {closed_err:.1e}; {n} derivatives: pair gap {gap:.1e}, vs dense SVD {svd_err:.1e}"
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn bound_ordering() -> Outcome {
    let (mut ordering, mut validity): (f64, f64) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut n = 0;
    for spec in presets() {
        for r in sweep_rows(&spec)? {
            ordering = ordering.max(r.qsl_mt - r.qsl_ml);
            validity = validity.max(r.qsl_unified - r.tau_d);
            n += 1;
        }
    }
    let ok = ordering <= 1e-12 && validity <= 1e-9;
    let msg = format!("{n} points: max(t_mt - t_ml) {ordering:.2e}, max(t_unified - tau_d) {validity:.3}");
    if ok { Ok(msg) } else { Err(msg) }
}

fn figure2_shape() -> Outcome {
    let spec = SweepSpec::fig2();
    let rows = sweep_rows(&spec)?;
    let groups = group_by_beta(&rows);
    let series: Vec<Vec<&OutputRow>> = groups
        .into_iter()
        .map(|(_, g)| g.into_iter().filter(|r| r.tau >= 2.0).collect())
        .collect();
    let mut beta_violation = f64::NEG_INFINITY;
    for pair in series.windows(2) {
        for (lo, hi) in pair[0].iter().zip(&pair[1]) {
            beta_violation = beta_violation.max(lo.qsl_unified - hi.qsl_unified);
        }
    }
    let tau_violation = series
        .iter()
        .map(|s| max_increase(&column(s, |r| r.qsl_unified)))
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = beta_violation < 1e-9 && tau_violation <= 0.0;
    let msg = format!(
        "tau >= 2: max decrease across beta {beta_violation:.2e} (< 1e-9), max increase in tau {tau_violation:.2e} (<= 0)"
    );
    if ok { Ok(msg) } else { Err(msg) }
}

fn figure3_shape() -> Outcome {
    let spec = SweepSpec::fig3();
    let rows = sweep_rows(&spec)?;
    let series: Vec<Vec<f64>> = group_by_beta(&rows)
        .into_iter()
        .map(|(_, g)| column(&g, |r| r.qsl_unified))
        .collect();
    let counts: Vec<usize> = series.iter().map(|s| interior_extrema(s).len()).collect();
    let (small, large) = (&series[0], &series[series.len() - 1]);
    let first = interior_extrema(small).first().copied().unwrap_or(small.len());
    let dominance = dominance_fraction(large, small, first);
    let ok = counts.iter().all(|&c| c >= 2) && dominance >= 0.9;
    let msg = format!("interior extrema per beta {counts:?} (>= 2), dominance past index {first}: {dominance:.3} (>= 0.9)");
    if ok { Ok(msg) } else { Err(msg) }
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_leaky-qsl");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for (k, threads) in ["1", "1", "4", "3"].iter().enumerate() {
        let path = dir.path().join(format!("fig2_{k}.csv"));
        let status = Command::new(exe)
            .args(["figure2", "--threads", threads, "--csv"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("figure2 --threads {threads} exited with {status}"));
        }
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let in_process = rows_to_csv_string(&run_sweep(&SweepSpec::fig2(), 2).map_err(|e| e.to_string())?.rows);
    let ok = files.iter().all(|f| f == &files[0]) && in_process.as_bytes() == files[0].as_slice();
    let msg = format!("4 CLI runs (threads 1, 1, 4, 3) and an in-process run: {} bytes each", files[0].len());
    if ok { Ok(msg) } else { Err(msg) }
}

fn trivial_limits() -> Outcome {
    let mut worst: f64 = 0.0;
    for spec in presets() {
        let spec = SweepSpec { tau_d: 1e-6, ..spec };
        for r in sweep_rows(&spec)? {
            worst = worst.max(r.qsl_unified);
        }
    }
    let mut numerator: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(-3.0..3.0));
        let s = density_matrix(a, MAX_COHERENT.0, MAX_COHERENT.1).unwrap();
        numerator = numerator.max(qsl_numerator(&s, &s));
    }
    let ok = worst < 1e-4 && numerator == 0.0;
    let msg = format!("tau_d = 1e-6: max t_unified {worst:.3e} (< 1e-4); identical-state numerator {numerator:e}");
    if ok { Ok(msg) } else { Err(msg) }
}

fn main() -> ExitCode {
    let criteria: [(&str, Criterion); 11] = [
        ("kernel oracle", kernel_oracle),
        ("static exact limit", static_limit),
        ("analytic/Volterra equivalence", solver_equivalence),
        ("Markov limit", markov_limit),
        ("state invariants", state_invariants),
        ("singular-value closed forms", singular_values),
        ("bound ordering", bound_ordering),
        ("figure 2 shape", figure2_shape),
        ("figure 3 shape", figure3_shape),
        ("determinism and parallel equivalence", determinism),
        ("trivial limits", trivial_limits),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (tag, msg) = match check() {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("{tag} [{:>2}] {name}: {msg} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
