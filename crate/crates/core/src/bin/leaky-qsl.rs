use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use leaky_qsl::amplitude::solve_trajectory;
use leaky_qsl::output::{write_csv, write_rows, write_svg};
use leaky_qsl::params::beta_from_scale;
use leaky_qsl::sweep::{run_sweep, SweepOutcome};
use leaky_qsl::validate::{validate, Tolerances};
use leaky_qsl::{Error, Frame, Preset, Solver, SweepSpec};

#[derive(Parser)]
#[command(name = "leaky-qsl", version, about = "Quantum speed limit of a qubit moving in a leaky cavity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the amplitude trajectory on [0, tau-stop].
    Trace(GridArgs),
    /// QSL times at a single initial time (tau-start) and velocity.
    Qsl(GridArgs),
    /// Sweep over velocities and initial times.
    Sweep(GridArgs),
    /// Weak-coupling preset.
    Figure2(GridArgs),
    /// Strong-coupling preset.
    Figure3(GridArgs),
    /// Run the built-in cross-checks.
    Validate(ValidateArgs),
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// lambda / gamma
    #[arg(long)]
    y1: Option<f64>,
    /// omega0 / gamma
    #[arg(long)]
    y2: Option<f64>,
    /// (omega0 - omega_n) / gamma
    #[arg(long, allow_hyphen_values = true)]
    y3: Option<f64>,
    /// Velocity as beta = x * 1e-9; repeatable.
    #[arg(long = "beta-x")]
    beta_x: Vec<f64>,
    #[arg(long)]
    tau_start: Option<f64>,
    #[arg(long)]
    tau_stop: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    /// Driving time.
    #[arg(long)]
    tau_d: Option<f64>,
    /// analytic, volterra or auto.
    #[arg(long)]
    solver: Option<Solver>,
    /// Volterra step.
    #[arg(long)]
    h: Option<f64>,
    /// Simpson panels over the driving window (even).
    #[arg(long)]
    n_quad: Option<usize>,
    /// rotating or lab.
    #[arg(long)]
    frame: Option<Frame>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Accepted for compatibility; the dynamics are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Apply one tolerance to every check.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Override a single check, as `name=value`.
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

enum Failure {
    Usage(String),
    Solver(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::VolterraNonConvergence { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::DegenerateRoots { .. } => Failure::Solver(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn build_spec(args: &GridArgs, preset: Preset) -> Result<SweepSpec, Failure> {
    let text = match &args.config {
        Some(path) => Some(
            std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        ),
        None => None,
    };
    // Figure commands pin their preset; other commands take it from the file.
    let mut spec = match (&text, preset) {
        (Some(text), Preset::Custom) => SweepSpec::from_config_str(text)?,
        (Some(text), _) => {
            let mut spec = SweepSpec::preset(preset);
            spec.overlay_config(text)?;
            spec
        }
        (None, _) => SweepSpec::preset(preset),
    };
    if let Some(v) = args.y1 {
        spec.y1 = v;
    }
    if let Some(v) = args.y2 {
        spec.y2 = v;
    }
    if let Some(v) = args.y3 {
        spec.y3 = v;
    }
    if !args.beta_x.is_empty() {
        spec.beta_values = args.beta_x.iter().map(|&x| beta_from_scale(x)).collect();
    }
    if let Some(v) = args.tau_start {
        spec.tau_start = v;
    }
    if let Some(v) = args.tau_stop {
        spec.tau_stop = v;
    }
    if let Some(v) = args.tau_count {
        spec.tau_count = v;
    }
    if let Some(v) = args.tau_d {
        spec.tau_d = v;
    }
    if let Some(v) = args.solver {
        spec.solver = v;
    }
    if let Some(v) = args.h {
        spec.volterra_h = v;
    }
    if let Some(v) = args.n_quad {
        spec.n_quad = v;
    }
    if let Some(v) = args.frame {
        spec.frame = v;
    }
    spec.validate()?;
    Ok(spec)
}

fn emit(outcome: &SweepOutcome, args: &GridArgs) -> Result<(), Failure> {
    match &args.csv {
        Some(path) => write_csv(&outcome.rows, path)?,
        None => write_rows(&outcome.rows, std::io::stdout().lock())
            .map_err(|e| Failure::Usage(format!("stdout: {e}")))?,
    }
    for f in &outcome.failures {
        eprintln!("beta = {:e}, tau = {}: {}", f.beta, f.tau, f.error);
    }
    if let Some(path) = &args.plot {
        match write_svg(&outcome.rows, path) {
            Err(e) if outcome.failures.is_empty() => return Err(e.into()),
            Err(e) => eprintln!("error: {e}"),
            Ok(()) => {}
        }
    }
    match outcome.failures.first() {
        None => Ok(()),
        Some(f) => Err(Failure::from(f.error.clone())),
    }
}

fn run_grid(args: &GridArgs, preset: Preset) -> Result<(), Failure> {
    let spec = build_spec(args, preset)?;
    let outcome = run_sweep(&spec, args.threads)?;
    emit(&outcome, args)
}

fn run_qsl(args: &GridArgs) -> Result<(), Failure> {
    if args.beta_x.len() > 1 {
        return Err(Failure::Usage("qsl takes a single --beta-x".into()));
    }
    let mut spec = build_spec(args, Preset::Custom)?;
    spec.beta_values.truncate(1);
    spec.tau_count = 1;
    let outcome = run_sweep(&spec, 1)?;
    emit(&outcome, args)
}

fn run_trace(args: &GridArgs) -> Result<(), Failure> {
    if args.beta_x.len() > 1 {
        return Err(Failure::Usage("trace takes a single --beta-x".into()));
    }
    if args.plot.is_some() {
        return Err(Failure::Usage("trace does not produce a plot".into()));
    }
    let spec = build_spec(args, Preset::Custom)?;
    let d = spec.params(spec.beta_values[0])?;
    let traj = solve_trajectory(&d, spec.tau_stop, spec.solver, spec.volterra_h, spec.volterra_tol)?
        .with_frame(spec.frame, &d);
    let mut buf = String::from("t,re_a_tilde,im_a_tilde,re_a_full,im_a_full,re_a_dot,im_a_dot,abs_a\n");
    for i in 0..traj.len() {
        let (a, f, df) = (traj.a_tilde[i], traj.a_full[i], traj.a_dot[i]);
        buf.push_str(&format!(
            "{:?},{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n",
            traj.t_grid[i],
            a.re,
            a.im,
            f.re,
            f.im,
            df.re,
            df.im,
            a.norm()
        ));
    }
    let io = |p: &Path, e: std::io::Error| Failure::Usage(format!("{}: {e}", p.display()));
    match &args.csv {
        Some(path) => std::fs::write(path, buf).map_err(|e| io(path, e))?,
        None => std::io::stdout()
            .write_all(buf.as_bytes())
            .map_err(|e| io(Path::new("stdout"), e))?,
    }
    Ok(())
}

fn run_validate(args: &ValidateArgs) -> Result<(), Failure> {
    let mut tol = match args.tolerance {
        Some(v) => Tolerances::uniform(v),
        None => Tolerances::default(),
    };
    for item in &args.tol {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("expected NAME=VALUE, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("cannot parse tolerance `{value}`")))?;
        tol.set(name.trim(), value)?;
    }
    let report = validate(&tol, args.threads);
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Validation)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Trace(a) => run_trace(a),
        Command::Qsl(a) => run_qsl(a),
        Command::Sweep(a) => run_grid(a, Preset::Custom),
        Command::Figure2(a) => run_grid(a, Preset::Fig2),
        Command::Figure3(a) => run_grid(a, Preset::Fig3),
        Command::Validate(a) => run_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Validation) => ExitCode::from(3),
    }
}
