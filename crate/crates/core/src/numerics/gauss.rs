//! Adaptive composite Gauss–Legendre quadrature along contours.
//!
//! Each panel is integrated with a fixed 10-point Gauss–Legendre rule. A panel
//! is accepted when the whole-panel value and the sum of its two halves differ
//! by at most the panel's share of the tolerance (share proportional to its
//! parameter width); otherwise it is halved. The accepted value is the sum of
//! the halves, and the reported error is the sum of the accepted differences,
//! which bounds the error of the refined value for integrands analytic near the
//! arc. Panels are processed depth-first, left to right, so the summation order
//! is fixed for given inputs.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::contour::{Contour, Segment};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, is_finite_c, lit, to_f64, Real};

/// Number of nodes in each panel rule.
pub const PANEL_ORDER: usize = 10;

const MAX_EVALUATIONS: usize = 2_000_000;
const MIN_PANEL_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult<T> {
    pub value: Complex<T>,
    pub abs_error_estimate: T,
    pub evaluations: usize,
}

impl<T: Real> QuadratureResult<T> {
    fn zero() -> Self {
        Self {
            value: Complex::new(T::zero(), T::zero()),
            abs_error_estimate: T::zero(),
            evaluations: 0,
        }
    }

    fn absorb(&mut self, other: &Self) {
        self.value = self.value + other.value;
        self.abs_error_estimate = self.abs_error_estimate + other.abs_error_estimate;
        self.evaluations += other.evaluations;
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1);
    let mut nodes = vec![T::zero(); n];
    let mut weights = vec![T::zero(); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Newton iteration in f64 seeded by the Tricomi approximation, then
        // polished in T.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let mut xt: T = lit(x);
        for _ in 0..3 {
            let (p, dp) = legendre_t(n, xt);
            xt = xt - p / dp;
        }
        let (_, dp) = legendre_t(n, xt);
        let w = lit::<T>(2.0) / ((T::one() - xt * xt) * dp * dp);
        nodes[i] = -xt;
        nodes[n - 1 - i] = xt;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn legendre_t<T: Real>(n: usize, x: T) -> (T, T) {
    let (mut p0, mut p1) = (T::one(), x);
    for k in 2..=n {
        let kf: T = from_usize(k);
        let p2 = ((kf + kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf: T = from_usize(n);
    let dp = nf * (x * p1 - p0) / (x * x - T::one());
    (p1, dp)
}

struct PanelRule<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> PanelRule<T> {
    fn new() -> Self {
        let (nodes, weights) = gauss_legendre(PANEL_ORDER);
        Self { nodes, weights }
    }

    fn apply<F>(&self, f: &F, seg: &Segment<T>, a: T, b: T) -> Result<Complex<T>>
    where
        F: Fn(Complex<T>) -> Complex<T> + ?Sized,
    {
        let half = (b - a) / lit(2.0);
        let mid = (a + b) / lit(2.0);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let t = mid + half * *x;
            let (z, dz) = seg.eval(t);
            let v = f(z);
            if !is_finite_c(v) {
                return Err(Error::SingularIntegrand { t: to_f64(t) });
            }
            acc = acc + v * dz * *w;
        }
        Ok(acc * half)
    }
}

/// Adaptive integral of `f` along a single arc with absolute tolerance `tol`.
pub fn integrate_segment<T, F>(f: &F, seg: &Segment<T>, tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let rule = PanelRule::new();
    adaptive(f, seg, tol, &rule)
}

fn adaptive<T, F>(f: &F, seg: &Segment<T>, tol: T, rule: &PanelRule<T>) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter("quadrature tolerance must be positive".into()));
    }
    let mut out = QuadratureResult::<T>::zero();
    let whole = rule.apply(f, seg, T::zero(), T::one())?;
    out.evaluations += PANEL_ORDER;
    let mut stack = vec![(T::zero(), T::one(), whole)];
    let min_width: T = lit(MIN_PANEL_WIDTH);
    let mut unmet = false;
    while let Some((a, b, q)) = stack.pop() {
        let m = (a + b) / lit(2.0);
        let ql = rule.apply(f, seg, a, m)?;
        let qr = rule.apply(f, seg, m, b)?;
        out.evaluations += 2 * PANEL_ORDER;
        let refined = ql + qr;
        let est = (q - refined).norm();
        let budget = tol * (b - a);
        if est <= budget || (b - a) < min_width {
            if est > budget {
                unmet = true;
            }
            out.value = out.value + refined;
            out.abs_error_estimate = out.abs_error_estimate + est;
        } else {
            stack.push((m, b, qr));
            stack.push((a, m, ql));
        }
        if out.evaluations > MAX_EVALUATIONS {
            // Fold the unresolved panels in at their current estimates.
            for (_, _, q) in stack.drain(..).rev() {
                out.value = out.value + q;
            }
            out.abs_error_estimate = out.abs_error_estimate.max(tol + tol);
            return Err(Error::tolerance_not_met(&out));
        }
    }
    if unmet {
        return Err(Error::tolerance_not_met(&out));
    }
    Ok(out)
}

/// Integral of `f` along `contour` with absolute error estimate at most `tol`.
///
/// The tolerance is distributed over the arcs in proportion to their lengths.
pub fn integrate_contour<T, F>(f: &F, contour: &Contour<T>, tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let rule = PanelRule::new();
    let total = contour.length();
    let n: T = from_usize(contour.segments().len());
    let mut out = QuadratureResult::<T>::zero();
    for seg in contour.segments() {
        let share = if total > T::zero() {
            seg.length() / total
        } else {
            T::one() / n
        };
        if share == T::zero() {
            continue;
        }
        let part = adaptive(f, seg, tol * share, &rule)?;
        out.absorb(&part);
    }
    Ok(out)
}
