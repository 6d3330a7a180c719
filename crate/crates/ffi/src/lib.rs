//! C ABI over `leaky_qsl`.
//!
//! A model is created with `lq_model_new`, queried, and released with
//! `lq_model_free`. Every fallible call returns an `LqStatus`; the message of
//! the most recent failure on the calling thread is available from
//! `lq_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use leaky_qsl::amplitude::{solve_trajectory, DEFAULT_STEP, DEFAULT_VOLTERRA_TOL};
use leaky_qsl::qsl::{closed_system_qsl, qsl_times};
use leaky_qsl::{AmplitudeTrajectory, DimensionlessParams, Error, Frame, QslInputs, Solver};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NonConvergence = 3,
    DegenerateRoots = 4,
    OutOfRange = 5,
    ZeroDenominator = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LqSolver {
    Auto = 0,
    Analytic = 1,
    Volterra = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LqQsl {
    pub numerator: f64,
    pub t_ml: f64,
    pub t_mt: f64,
    pub t_unified: f64,
}

/// Opaque handle holding a sampled trajectory in the rotating frame.
pub struct LqModel {
    traj: AmplitudeTrajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LqStatus {
    match e {
        Error::VolterraNonConvergence { .. } | Error::QuadratureNonConvergence { .. } => {
            LqStatus::NonConvergence
        }
        Error::DegenerateRoots { .. } => LqStatus::DegenerateRoots,
        Error::OutOfRange { .. } => LqStatus::OutOfRange,
        Error::ZeroDenominator { .. } | Error::ZeroEnergy => LqStatus::ZeroDenominator,
        _ => LqStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), LqStatus>) -> LqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LqStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            LqStatus::Panic
        }
    }
}

fn check<T>(r: leaky_qsl::Result<T>) -> Result<T, LqStatus> {
    r.map_err(|e| {
        set_error(&e.to_string());
        status_of(&e)
    })
}

fn null() -> LqStatus {
    set_error("null pointer argument");
    LqStatus::NullPointer
}

/// Builds a model for `t` in `[0, t_max]`. `beta` is the velocity ratio `v/c`
/// and `solver` one of the `LqSolver` values.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lq_model_new(
    y1: f64,
    y2: f64,
    y3: f64,
    beta: f64,
    solver: u32,
    t_max: f64,
    out: *mut *mut LqModel,
) -> LqStatus {
    if out.is_null() {
        return null();
    }
    *out = ptr::null_mut();
    guarded(|| {
        let d = check(DimensionlessParams::new(y1, y2, y3, beta))?;
        let solver = match solver {
            s if s == LqSolver::Auto as u32 => Solver::Auto,
            s if s == LqSolver::Analytic as u32 => Solver::Analytic,
            s if s == LqSolver::Volterra as u32 => Solver::Volterra,
            other => {
                set_error(&format!("unknown solver {other}"));
                return Err(LqStatus::InvalidArgument);
            }
        };
        let traj = check(solve_trajectory(&d, t_max, solver, DEFAULT_STEP, DEFAULT_VOLTERRA_TOL))?
            .with_frame(Frame::Rotating, &d);
        *out = Box::into_raw(Box::new(LqModel { traj }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from `lq_model_new` and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lq_model_free(model: *mut LqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Solver actually used: `LQ_SOLVER_ANALYTIC` or `LQ_SOLVER_VOLTERRA`.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lq_model_solver(model: *const LqModel, out: *mut LqSolver) -> LqStatus {
    if model.is_null() || out.is_null() {
        return null();
    }
    *out = match (*model).traj.solver {
        Solver::Volterra => LqSolver::Volterra,
        _ => LqSolver::Analytic,
    };
    LqStatus::Ok
}

/// Slow amplitude `Ã(t)`.
///
/// # Safety
/// `model`, `re` and `im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lq_amplitude(model: *const LqModel, t: f64, re: *mut f64, im: *mut f64) -> LqStatus {
    if model.is_null() || re.is_null() || im.is_null() {
        return null();
    }
    let model = &*model;
    guarded(|| {
        let (a, _) = check(model.traj.slow_at(t))?;
        *re = a.re;
        *im = a.im;
        Ok(())
    })
}

/// QSL times for the window `[tau, tau + tau_d]`; `n_quad` must be even.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lq_qsl(
    model: *const LqModel,
    tau: f64,
    tau_d: f64,
    n_quad: u32,
    out: *mut LqQsl,
) -> LqStatus {
    if model.is_null() || out.is_null() {
        return null();
    }
    let model = &*model;
    guarded(|| {
        let r = check(qsl_times(&QslInputs {
            traj: &model.traj,
            tau,
            tau_d,
            n_quad: n_quad as usize,
        }))?;
        *out = LqQsl {
            numerator: r.numerator,
            t_ml: r.t_ml,
            t_mt: r.t_mt,
            t_unified: r.t_unified,
        };
        Ok(())
    })
}

/// Closed-system bound `max(pi hbar / 2E, pi hbar / 2 dE)`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lq_closed_system_qsl(mean_energy: f64, energy_spread: f64, hbar: f64, out: *mut f64) -> LqStatus {
    if out.is_null() {
        return null();
    }
    guarded(|| {
        *out = check(closed_system_qsl(mean_energy, energy_spread, hbar))?;
        Ok(())
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn lq_status_string(status: LqStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        LqStatus::Ok => b"ok\0",
        LqStatus::NullPointer => b"null pointer\0",
        LqStatus::InvalidArgument => b"invalid argument\0",
        LqStatus::NonConvergence => b"solver did not converge\0",
        LqStatus::DegenerateRoots => b"degenerate poles\0",
        LqStatus::OutOfRange => b"time outside the model range\0",
        LqStatus::ZeroDenominator => b"zero denominator\0",
        LqStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failure on this thread, valid until the next failing call.
#[no_mangle]
pub extern "C" fn lq_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
