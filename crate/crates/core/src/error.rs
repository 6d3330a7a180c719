use thiserror::Error;

/// Errors raised across the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("initial amplitudes are not normalized: |c1|^2 + |c2|^2 = {norm}")]
    Normalization { norm: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e}) within {budget} subdivisions")]
    QuadratureNonConvergence { tol: f64, estimate: f64, budget: usize },

    #[error("Volterra solver did not converge: estimated error {estimate:e} > tolerance {tol:e} after {refinements} refinements (h = {h:e})")]
    VolterraNonConvergence {
        estimate: f64,
        tol: f64,
        refinements: usize,
        h: f64,
    },

    #[error("cubic roots are degenerate (min pairwise distance {min_distance:e}); use the Volterra solver")]
    DegenerateRoots { min_distance: f64 },

    #[error("time {t} lies outside the trajectory range [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },

    #[error("QSL denominator vanishes on [{tau}, {tau} + {tau_d}]: the state is stationary over the window")]
    ZeroDenominator { tau: f64, tau_d: f64 },

    #[error("both energy scales are zero; the closed-system bound is undefined")]
    ZeroEnergy,

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn io_error(path: &std::path::Path, err: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: err.to_string(),
    }
}
