//! Open-system dynamics and quantum speed limit of a qubit moving at constant
//! velocity inside a leaky cavity.
//!
//! The pipeline runs `params` → `kernel`/`cubic` → `amplitude` → `dynamics`
//! → `qsl`, with `sweep`, `output` and `validate` driving parameter grids,
//! file emission and the built-in cross-checks.

// `!(x > 0.0)` style comparisons are used to also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod amplitude;
pub mod analysis;
pub mod cubic;
pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod output;
pub mod params;
pub mod qsl;
pub mod quad;
pub mod sweep;
pub mod validate;

pub use amplitude::{AmplitudeTrajectory, Frame, ResidueAmplitude, Solver};
pub use error::{Error, Result};
pub use params::{CouplingRegime, DimensionlessParams, PhysicalParams};
pub use qsl::{QslInputs, QslResult};
pub use sweep::{OutputRow, Preset, SweepSpec};
