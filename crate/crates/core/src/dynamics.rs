//! Qubit density matrix, its time derivative, purities and singular values.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Amplitudes of the maximally coherent initial state.
pub const MAX_COHERENT: (Complex64, Complex64) = (
    Complex64::new(FRAC_1_SQRT_2, 0.0),
    Complex64::new(FRAC_1_SQRT_2, 0.0),
);

pub type Matrix2 = [[Complex64; 2]; 2];

/// 2x2 density matrix in the basis (excited, ground).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    pub rho00: f64,
    pub rho01: Complex64,
    pub rho11: f64,
}

impl QubitState {
    pub fn rho10(&self) -> Complex64 {
        self.rho01.conj()
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.rho00, 0.0), self.rho01],
            [self.rho10(), Complex64::new(self.rho11, 0.0)],
        ]
    }

    pub fn trace(&self) -> f64 {
        self.rho00 + self.rho11
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.rho00 + self.rho11);
        let half_gap = 0.5 * (self.rho00 - self.rho11);
        let r = half_gap.hypot(self.rho01.norm());
        (mean - r, mean + r)
    }
}

/// Time derivative of a [`QubitState`]; `d11 = -d00`, `d10 = conj(d01)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub d00: f64,
    pub d01: Complex64,
}

impl StateDerivative {
    pub fn d11(&self) -> f64 {
        -self.d00
    }

    pub fn matrix(&self) -> Matrix2 {
        [
            [Complex64::new(self.d00, 0.0), self.d01],
            [self.d01.conj(), Complex64::new(-self.d00, 0.0)],
        ]
    }
}

fn check_initial(c1: Complex64, c2: Complex64) -> Result<()> {
    let norm = c1.norm_sqr() + c2.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization { norm });
    }
    Ok(())
}

/// Reduced qubit state for amplitude `a` and initial amplitudes `(c1, c2)`.
pub fn density_matrix(a: Complex64, c1: Complex64, c2: Complex64) -> Result<QubitState> {
    check_initial(c1, c2)?;
    if !(a.norm() <= 1.0 + 1e-6) {
        return Err(invalid("a", format!("|A| = {} exceeds 1", a.norm())));
    }
    let excited = c1.norm_sqr() * a.norm_sqr();
    Ok(QubitState {
        rho00: excited,
        rho01: c1 * c2.conj() * a,
        rho11: 1.0 - excited,
    })
}

pub fn density_derivative(
    a: Complex64,
    a_dot: Complex64,
    c1: Complex64,
    c2: Complex64,
) -> Result<StateDerivative> {
    check_initial(c1, c2)?;
    Ok(StateDerivative {
        d00: c1.norm_sqr() * 2.0 * (a.conj() * a_dot).re,
        d01: c1 * c2.conj() * a_dot,
    })
}

/// `tr(rho sigma)` for two qubit states.
pub fn overlap(a: &QubitState, b: &QubitState) -> f64 {
    a.rho00 * b.rho00 + a.rho11 * b.rho11 + 2.0 * (a.rho01 * b.rho01.conj()).re
}

/// `tr(rho^2)`.
pub fn purity(s: &QubitState) -> f64 {
    s.rho00 * s.rho00 + s.rho11 * s.rho11 + 2.0 * s.rho01.norm_sqr()
}

/// `tr(rho_tau rho_later) / tr(rho_tau^2)`.
pub fn relative_purity(s_tau: &QubitState, s_later: &QubitState) -> f64 {
    // tr(rho^2) >= 1/2 for any qubit state
    overlap(s_tau, s_later) / purity(s_tau)
}

/// Singular values `(smaller, larger)` of a general complex 2x2 matrix.
///
/// A unitary rotation reduces `m` to upper-triangular `[[f, g], [0, h]]`;
/// the triangular values then follow LAPACK's `dlas2`, which keeps full
/// relative accuracy when the two values nearly coincide.
pub fn singular_values_2x2(m: &Matrix2) -> (f64, f64) {
    let r = m[0][0].norm().hypot(m[1][0].norm());
    if r == 0.0 {
        return (0.0, m[0][1].norm().hypot(m[1][1].norm()));
    }
    let g = (m[0][0].conj() * m[0][1] + m[1][0].conj() * m[1][1]).norm() / r;
    let h = (m[0][0] * m[1][1] - m[1][0] * m[0][1]).norm() / r;
    triangular_singular_values(r, g, h)
}

fn triangular_singular_values(f: f64, g: f64, h: f64) -> (f64, f64) {
    let (fa, ga, ha) = (f.abs(), g.abs(), h.abs());
    let (mn, mx) = (fa.min(ha), fa.max(ha));
    if mn == 0.0 {
        let big = if mx == 0.0 { ga } else { mx.hypot(ga) };
        return (0.0, big);
    }
    let s = 1.0 + mn / mx;
    let t = (mx - mn) / mx;
    if ga < mx {
        let u = (ga / mx).powi(2);
        let c = 2.0 / ((s * s + u).sqrt() + (t * t + u).sqrt());
        (mn * c, mx / c)
    } else {
        let u = mx / ga;
        if u == 0.0 {
            return (mn * mx / ga, ga);
        }
        let c = 1.0 / ((1.0 + (s * u).powi(2)).sqrt() + (1.0 + (t * u).powi(2)).sqrt());
        (2.0 * mn * c * u, ga / (2.0 * c))
    }
}

/// Singular values `(rho_1, rho_2)` of the state, ascending.
pub fn state_singular_values(s: &QubitState) -> (f64, f64) {
    singular_values_2x2(&s.matrix())
}

/// Closed form `1/2 -/+ 1/2 sqrt(|A|^4 - |A|^2 + 1)` for the maximally
/// coherent family.
pub fn state_singular_values_closed(abs_a: f64) -> (f64, f64) {
    let x = abs_a * abs_a;
    let r = 0.5 * (x * x - x + 1.0).sqrt();
    (0.5 - r, 0.5 + r)
}

/// Both singular values of the traceless Hermitian derivative, which are equal.
pub fn derivative_singular_values(d: &StateDerivative) -> (f64, f64) {
    let k = d.d00.hypot(d.d01.norm());
    (k, k)
}

/// Readings of the expanded coherence-rate expression's final term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KappaReading {
    /// `4 A^2 Ȧ^2` taken literally (complex).
    Literal,
    /// `4 (Re(A* Ȧ))^2`.
    RealPart,
}

/// Expanded closed form for the derivative singular value of the maximally
/// coherent family, evaluated with the slow amplitude `a`, its derivative
/// `a_dot` and the transition frequency `omega0`.
pub fn kappa_expanded(a: Complex64, a_dot: Complex64, omega0: f64, reading: KappaReading) -> f64 {
    let i = Complex64::new(0.0, 1.0);
    let base = omega0 * omega0 * a.norm_sqr() + a_dot.norm_sqr()
        - i * omega0 * a * a_dot.conj()
        + i * omega0 * a.conj() * a_dot;
    let last = match reading {
        KappaReading::Literal => 4.0 * a * a * a_dot * a_dot,
        KappaReading::RealPart => Complex64::new(4.0 * (a.conj() * a_dot).re.powi(2), 0.0),
    };
    match reading {
        KappaReading::Literal => 0.5 * (base + last).sqrt().norm(),
        KappaReading::RealPart => 0.5 * (base + last).re.max(0.0).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const C1: Complex64 = MAX_COHERENT.0;
    const C2: Complex64 = MAX_COHERENT.1;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn initial_and_decayed_states() {
        let s = density_matrix(re(1.0), C1, C2).unwrap();
        assert_abs_diff_eq!(s.rho00, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho01.re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho11, 0.5, epsilon = 1e-15);
        let s = density_matrix(re(0.0), C1, C2).unwrap();
        assert_eq!((s.rho00, s.rho01, s.rho11), (0.0, re(0.0), 1.0));
        let s = density_matrix(re(FRAC_1_SQRT_2), C1, C2).unwrap();
        assert_abs_diff_eq!(s.rho00, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho01.norm(), 0.5 * FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.rho11, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            density_matrix(re(1.0), re(1.0), re(1.0)),
            Err(Error::Normalization { .. })
        ));
        assert!(density_matrix(re(1.1), C1, C2).is_err());
        assert!(density_derivative(re(1.0), re(0.0), re(0.5), re(0.5)).is_err());
    }

    #[test]
    fn derivative_cases() {
        let d = density_derivative(re(0.7), re(0.0), C1, C2).unwrap();
        assert_eq!(d.d00, 0.0);
        assert_eq!(d.d01, re(0.0));
        // pure phase motion at t = 0: A' = i omega0
        let w0 = 12.0;
        let d = density_derivative(re(1.0), Complex64::new(0.0, w0), C1, C2).unwrap();
        assert_abs_diff_eq!(d.d00, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.d01.im, 0.5 * w0, epsilon = 1e-12);
        assert_eq!(d.d11(), -d.d00);
    }

    #[test]
    fn purities() {
        assert_abs_diff_eq!(purity(&density_matrix(re(1.0), C1, C2).unwrap()), 1.0, epsilon = 1e-15);
        let mixed = QubitState {
            rho00: 0.5,
            rho01: re(0.0),
            rho11: 0.5,
        };
        assert_eq!(purity(&mixed), 0.5);
        let half = density_matrix(re(FRAC_1_SQRT_2), C1, C2).unwrap();
        assert_abs_diff_eq!(purity(&half), 0.875, epsilon = 1e-15);
    }

    #[test]
    fn relative_purity_cases() {
        let pure = density_matrix(re(1.0), C1, C2).unwrap();
        let ground = density_matrix(re(0.0), C1, C2).unwrap();
        assert_abs_diff_eq!(relative_purity(&pure, &pure), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(relative_purity(&pure, &ground), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn state_singular_value_cases() {
        for a in [1.0, 0.0] {
            let (s1, s2) = state_singular_values(&density_matrix(re(a), C1, C2).unwrap());
            assert_abs_diff_eq!(s1, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(s2, 1.0, epsilon = 1e-15);
        }
        let (s1, s2) = state_singular_values(&density_matrix(re(FRAC_1_SQRT_2), C1, C2).unwrap());
        let r = 0.5 * 0.75f64.sqrt();
        assert_abs_diff_eq!(s1, 0.5 - r, epsilon = 1e-10);
        assert_abs_diff_eq!(s2, 0.5 + r, epsilon = 1e-10);
        assert_abs_diff_eq!(s1, 0.06699, epsilon = 1e-5);
    }

    #[test]
    fn derivative_singular_value_cases() {
        let zero = StateDerivative {
            d00: 0.0,
            d01: re(0.0),
        };
        assert_eq!(derivative_singular_values(&zero), (0.0, 0.0));
        let d = StateDerivative {
            d00: 0.3,
            d01: Complex64::new(0.0, 0.4),
        };
        let (k1, k2) = derivative_singular_values(&d);
        assert_abs_diff_eq!(k1, 0.5, epsilon = 1e-15);
        assert_eq!(k1, k2);
        let (g1, g2) = singular_values_2x2(&d.matrix());
        assert_abs_diff_eq!(g1, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(g2, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn expanded_kappa_real_reading_matches_conjugate_convention() {
        // A = Ã e^{-i w0 t}
        let (a, da, w0, t) = (
            Complex64::new(0.6, 0.2),
            Complex64::new(-0.1, 0.05),
            7.0,
            0.3,
        );
        let phase = Complex64::from_polar(1.0, -w0 * t);
        let full = a * phase;
        let full_dot = (da - Complex64::new(0.0, w0) * a) * phase;
        let d = density_derivative(full, full_dot, C1, C2).unwrap();
        let exact = derivative_singular_values(&d).0;
        assert_abs_diff_eq!(kappa_expanded(a, da, w0, KappaReading::RealPart), exact, epsilon = 1e-12);
        assert!((kappa_expanded(a, da, w0, KappaReading::Literal) - exact).abs() > 1e-6);
    }
}
