//! Numerical quadrature: adaptive Gauss-Kronrod (21 points) for complex
//! integrands and composite Simpson for smooth real ones.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077958109831074,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// One 21-point Kronrod panel; returns (Kronrod estimate, |Kronrod - Gauss|).
fn gk21<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = Complex64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let k = kronrod * half;
    let g = gauss * half;
    (k, (k - g).norm())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOutcome {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive integration over the partition given by `breakpoints`
/// (sorted, at least two points). The panel with the largest error estimate
/// is bisected until the summed estimate drops below `abs_tol` or the number
/// of bisections reaches `max_bisections`.
pub fn integrate_adaptive<F>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
    max_bisections: usize,
) -> Result<QuadOutcome>
where
    F: Fn(f64) -> Complex64,
{
    if breakpoints.len() < 2 {
        return Err(invalid("breakpoints", "need at least two points"));
    }
    if !(abs_tol > 0.0) {
        return Err(invalid("abs_tol", format!("must be > 0, got {abs_tol}")));
    }
    let mut heap = BinaryHeap::with_capacity(breakpoints.len());
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    for w in breakpoints.windows(2) {
        let (value, error) = gk21(&f, w[0], w[1]);
        total += value;
        total_err += error;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            error,
        });
    }

    let mut bisections = 0;
    while total_err > abs_tol {
        if bisections >= max_bisections {
            return Err(Error::QuadratureNonConvergence {
                tol: abs_tol,
                estimate: total_err,
                budget: max_bisections,
            });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = gk21(&f, worst.a, mid);
        let (rv, re) = gk21(&f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: lv,
            error: le,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: rv,
            error: re,
        });
        bisections += 1;
    }

    // Re-sum to shed the drift of the running totals.
    let panels = heap.len();
    let (value, error) = heap
        .into_iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| {
            (v + p.value, e + p.error)
        });
    Ok(QuadOutcome {
        value,
        error,
        panels,
    })
}

/// Composite Simpson rule with `panels` subintervals (must be even and > 0).
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> Result<f64> {
    if panels == 0 || !panels.is_multiple_of(2) {
        return Err(invalid("n_quad", format!("must be even and > 0, got {panels}")));
    }
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    Ok(sum * h / 3.0)
}

/// Composite Simpson rule over equally spaced samples (odd count >= 3).
pub fn simpson_samples(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(invalid("n_quad", format!("need an even number of panels, got {}", n.saturating_sub(1))));
    }
    let inner: f64 = values[1..n - 1]
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { 4.0 * v } else { 2.0 * v })
        .sum();
    Ok((values[0] + values[n - 1] + inner) * h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact_on_one_panel() {
        let out = integrate_adaptive(|x| Complex64::new(x.powi(7), -x * x), &[0.0, 2.0], 1e-14, 0)
            .unwrap();
        assert!((out.value.re - 32.0).abs() < 1e-12);
        assert!((out.value.im + 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_fourier_integral() {
        // int_0^{10 pi} cos(x) e^{-ix} dx = 5 pi
        let bps: Vec<f64> = (0..=10).map(|k| k as f64 * PI).collect();
        let out = integrate_adaptive(
            |x| x.cos() * Complex64::new(0.0, -x).exp(),
            &bps,
            1e-12,
            1000,
        )
        .unwrap();
        assert!((out.value - Complex64::new(5.0 * PI, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn adapts_to_a_peak() {
        // Lorentzian of width 1e-3 integrated over [-1, 1].
        let w: f64 = 1e-3;
        let exact = 2.0 * (1.0 / w).atan() / w;
        let out = integrate_adaptive(
            |x| Complex64::new(1.0 / (x * x + w * w), 0.0),
            &[-1.0, 1.0],
            1e-8 * exact,
            500,
        )
        .unwrap();
        assert!((out.value.re - exact).abs() < 1e-7 * exact);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let err = integrate_adaptive(|x| Complex64::new((1.0 / x).sin(), 0.0), &[1e-6, 1.0], 1e-15, 3)
            .unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x, 0.0, 3.0, 2).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
        assert!(simpson(|x| x, 0.0, 1.0, 3).is_err());
        assert!(simpson(|x| x, 0.0, 1.0, 0).is_err());
        let xs: Vec<f64> = (0..=4).map(|k| (k as f64 * 0.75).powi(3)).collect();
        assert!((simpson_samples(&xs, 0.75).unwrap() - 81.0 / 4.0).abs() < 1e-12);
        assert!(simpson_samples(&xs[..4], 0.75).is_err());
    }
}
