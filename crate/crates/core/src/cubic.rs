//! Laplace poles of the amplitude: the monic cubic and its roots.
//!
//! Transforming the amplitude equation with the two-exponential kernel gives
//! `A(p) = (p + a1)(p + a2) / [p (p + a1)(p + a2) + (y1/4)(p + lambda_bar)]`
//! with `a1,2 = lambda_bar -/+ theta`, so the poles solve
//! `q^3 + 2 lambda_bar q^2 + (lambda_bar^2 - theta^2 + y1/4) q + y1 lambda_bar / 4 = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::DimensionlessParams;

/// Relative pairwise distance below which roots count as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-6;

/// Residual bound `|p(q)| <= RESIDUAL_TOLERANCE * max(1, |q|^3)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CubicMode {
    /// Coefficients with the stored `u_plus`, `u_minus` substituted.
    Substituted,
    /// Coefficients derived from the Laplace transform of the kernel.
    Laplace,
}

/// Monic cubic `q^3 + c2 q^2 + c1 q + c0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub c2: Complex64,
    pub c1: Complex64,
    pub c0: Complex64,
}

impl CubicCoefficients {
    pub fn eval(&self, q: Complex64) -> Complex64 {
        ((q + self.c2) * q + self.c1) * q + self.c0
    }

    fn eval_with_derivative(&self, q: Complex64) -> (Complex64, Complex64) {
        let p = self.eval(q);
        let dp = (3.0 * q + 2.0 * self.c2) * q + self.c1;
        (p, dp)
    }

    /// Largest coefficient-wise difference to `other`.
    pub fn max_difference(&self, other: &Self) -> f64 {
        [
            (self.c2 - other.c2).norm(),
            (self.c1 - other.c1).norm(),
            (self.c0 - other.c0).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Numerator shifts `(s+, s-)` such that the transformed amplitude has
/// numerator `(q + s+)(q + s-)`.
pub fn numerator_shifts(d: &DimensionlessParams, mode: CubicMode) -> (Complex64, Complex64) {
    match mode {
        CubicMode::Substituted => (d.u_plus, d.u_minus),
        CubicMode::Laplace => (d.lambda_bar + d.theta, d.lambda_bar - d.theta),
    }
}

pub fn cubic_coefficients(d: &DimensionlessParams, mode: CubicMode) -> CubicCoefficients {
    let (sp, sm) = numerator_shifts(d, mode);
    let lb = d.lambda_bar;
    CubicCoefficients {
        c2: 2.0 * lb,
        c1: sp * sm + 0.25 * d.y1,
        c0: 0.25 * d.y1 * lb,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicRoots {
    /// Sorted by real part descending, then imaginary part descending.
    pub roots: [Complex64; 3],
    /// Smallest pairwise distance between roots.
    pub min_distance: f64,
    /// Largest scaled residual `|p(q)| / max(1, |q|^3)`.
    pub max_residual: f64,
    pub degenerate: bool,
}

impl CubicRoots {
    pub fn q1(&self) -> Complex64 {
        self.roots[0]
    }
    pub fn q2(&self) -> Complex64 {
        self.roots[1]
    }
    pub fn q3(&self) -> Complex64 {
        self.roots[2]
    }
    pub fn residuals_ok(&self) -> bool {
        self.max_residual <= RESIDUAL_TOLERANCE
    }
}

fn polish(c: &CubicCoefficients, mut q: Complex64) -> Complex64 {
    let mut best = (q, c.eval(q).norm());
    for _ in 0..8 {
        let (p, dp) = c.eval_with_derivative(q);
        if dp.norm() == 0.0 || p.norm() == 0.0 {
            break;
        }
        q -= p / dp;
        let r = c.eval(q).norm();
        if r < best.1 {
            best = (q, r);
        } else {
            break;
        }
    }
    best.0
}

/// Roots of `x^2 + b x + c` avoiding cancellation.
fn quadratic_roots(b: Complex64, c: Complex64) -> (Complex64, Complex64) {
    let disc = (b * b - 4.0 * c).sqrt();
    // Pick the sign making |b + sign * disc| large.
    let big = if (b + disc).norm() >= (b - disc).norm() {
        -(b + disc) / 2.0
    } else {
        -(b - disc) / 2.0
    };
    if big.norm() == 0.0 {
        return (big, big);
    }
    (big, c / big)
}

/// One root of the monic cubic from Cardano's formula on the depressed form.
fn cardano_root(c: &CubicCoefficients) -> Complex64 {
    let shift = c.c2 / 3.0;
    // x = q + shift solves x^3 + p x + r = 0
    let p = c.c1 - c.c2 * c.c2 / 3.0;
    let r = 2.0 * c.c2.powi(3) / 27.0 - c.c2 * c.c1 / 3.0 + c.c0;
    let disc = (r * r / 4.0 + p.powi(3) / 27.0).sqrt();
    let w = if (-r / 2.0 + disc).norm() >= (-r / 2.0 - disc).norm() {
        -r / 2.0 + disc
    } else {
        -r / 2.0 - disc
    };
    if w.norm() == 0.0 {
        return -shift;
    }
    let u = w.powf(1.0 / 3.0);
    u - p / (3.0 * u) - shift
}

fn sort_roots(roots: &mut [Complex64; 3]) {
    let scale = roots.iter().map(|q| q.norm()).fold(1.0, f64::max);
    roots.sort_by(|a, b| {
        if (a.re - b.re).abs() <= 1e-12 * scale {
            b.im.total_cmp(&a.im)
        } else {
            b.re.total_cmp(&a.re)
        }
    });
}

/// Solves the monic cubic `q^3 + c2 q^2 + c1 q + c0 = 0`.
///
/// One root comes from Cardano's formula, the remaining two from the deflated
/// quadratic; every root is Newton-polished against the original cubic.
pub fn solve_cubic(c2: Complex64, c1: Complex64, c0: Complex64) -> CubicRoots {
    let c = CubicCoefficients { c2, c1, c0 };
    let r1 = polish(&c, cardano_root(&c));
    // q^3 + c2 q^2 + c1 q + c0 = (q - r1)(q^2 + b q + e)
    let b = c2 + r1;
    let e = c1 + r1 * b;
    let (r2, r3) = quadratic_roots(b, e);
    let mut roots = [r1, polish(&c, r2), polish(&c, r3)];
    sort_roots(&mut roots);

    let max_mag = roots.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let min_distance = [
        (roots[0] - roots[1]).norm(),
        (roots[0] - roots[2]).norm(),
        (roots[1] - roots[2]).norm(),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let max_residual = roots
        .iter()
        .map(|&q| c.eval(q).norm() / q.norm().powi(3).max(1.0))
        .fold(0.0, f64::max);
    CubicRoots {
        roots,
        min_distance,
        max_residual,
        degenerate: min_distance <= DEGENERACY_THRESHOLD * max_mag,
    }
}

/// Poles of the amplitude for the given coefficient mode.
pub fn amplitude_poles(d: &DimensionlessParams, mode: CubicMode) -> CubicRoots {
    let c = cubic_coefficients(d, mode);
    solve_cubic(c.c2, c.c1, c.c0)
}
