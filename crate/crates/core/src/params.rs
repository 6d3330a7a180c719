//! Physical and reduced model parameters.
//!
//! The simulation runs in units where the decay scale `gamma` is one: times
//! are measured in `1/gamma` and rates in `gamma`. [`PhysicalParams`] only
//! exists for input and for the velocity mapping.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cavity and qubit configuration in absolute units (rad/time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Decay scale; `1/gamma` is the system time scale.
    pub gamma: f64,
    /// Lorentzian spectral width; `1/lambda_width` is the cavity correlation time.
    pub lambda_width: f64,
    /// Qubit transition frequency.
    pub omega0: f64,
    /// Cavity quasi-mode centre frequency.
    pub omega_n: f64,
    /// Velocity ratio `v/c`.
    pub beta: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("gamma", self.gamma),
            ("lambda_width", self.lambda_width),
            ("omega0", self.omega0),
            ("omega_n", self.omega_n),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {value}")));
            }
        }
        check_beta(self.beta)
    }
}

/// Reduced parameters in units of `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    /// `lambda / gamma`.
    pub y1: f64,
    /// `omega0 / gamma`.
    pub y2: f64,
    /// `(omega0 - omega_n) / gamma`.
    pub y3: f64,
    pub beta: f64,
    /// Shift parameter `(1+beta) + i beta y2 - i (1+beta) y3`.
    pub u_plus: Complex64,
    /// Shift parameter `(1-beta) - i beta y2 - i (1-beta) y3`.
    pub u_minus: Complex64,
    /// `beta (lambda_bar + i omega0)`, in units of gamma.
    pub theta: Complex64,
    /// `lambda - i Delta` with `Delta = omega0 - omega_n`, in units of gamma.
    pub lambda_bar: Complex64,
}

impl DimensionlessParams {
    /// Builds the reduced parameter set directly from `(y1, y2, y3, beta)`.
    pub fn new(y1: f64, y2: f64, y3: f64, beta: f64) -> Result<Self> {
        if !(y1.is_finite() && y1 > 0.0) {
            return Err(invalid("y1", format!("must be finite and > 0, got {y1}")));
        }
        if !(y2.is_finite() && y2 > 0.0) {
            return Err(invalid("y2", format!("must be finite and > 0, got {y2}")));
        }
        if !y3.is_finite() {
            return Err(invalid("y3", format!("must be finite, got {y3}")));
        }
        if y2 - y3 <= 0.0 {
            return Err(invalid(
                "y3",
                format!("cavity frequency y2 - y3 must be > 0, got {}", y2 - y3),
            ));
        }
        check_beta(beta)?;

        let lambda_bar = Complex64::new(y1, -y3);
        let theta = beta * (lambda_bar + I * y2);
        let u_plus = (1.0 + beta) + I * beta * y2 - I * (1.0 + beta) * y3;
        let u_minus = (1.0 - beta) - I * beta * y2 - I * (1.0 - beta) * y3;
        Ok(Self {
            y1,
            y2,
            y3,
            beta,
            u_plus,
            u_minus,
            theta,
            lambda_bar,
        })
    }

    /// Same parameters at a different velocity.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        Self::new(self.y1, self.y2, self.y3, beta)
    }

    /// Decay rates `lambda_bar - theta` and `lambda_bar + theta` of the two
    /// exponentials making up the memory kernel.
    pub fn kernel_rates(&self) -> (Complex64, Complex64) {
        (self.lambda_bar - self.theta, self.lambda_bar + self.theta)
    }

    /// Cavity centre frequency `omega_n / gamma`.
    pub fn omega_n(&self) -> f64 {
        self.y2 - self.y3
    }

    pub fn regime(&self) -> CouplingRegime {
        coupling_regime(self)
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && (0.0..1.0).contains(&beta)) {
        return Err(invalid("beta", format!("must lie in [0, 1), got {beta}")));
    }
    Ok(())
}

pub fn to_dimensionless(p: &PhysicalParams) -> Result<DimensionlessParams> {
    p.validate()?;
    DimensionlessParams::new(
        p.lambda_width / p.gamma,
        p.omega0 / p.gamma,
        (p.omega0 - p.omega_n) / p.gamma,
        p.beta,
    )
}

/// Converts the scale `x` (with `beta = x * 1e-9`) to the qubit
/// velocity in m/s for the 85Rb Rydberg microwave qubit.
pub fn beta_to_velocity(x: f64) -> Result<f64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(invalid("x", format!("velocity scale must be >= 0, got {x}")));
    }
    Ok(0.3 * x)
}

/// `beta = x * 1e-9`.
pub fn beta_from_scale(x: f64) -> f64 {
    x / 1e9
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CouplingRegime {
    /// `gamma <= lambda / 2`: memoryless decay.
    Weak,
    /// `gamma > lambda / 2`: information backflow.
    Strong,
}

/// Weak iff `y1 >= 2`. The boundary `gamma = lambda/2` counts as weak.
pub fn coupling_regime(d: &DimensionlessParams) -> CouplingRegime {
    if d.y1 >= 2.0 {
        CouplingRegime::Weak
    } else {
        CouplingRegime::Strong
    }
}
