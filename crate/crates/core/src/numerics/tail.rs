//! Real-line integrals of functions that are sums of declared Gaussian bumps.

use num_complex::Complex;

use super::contour::Segment;
use super::gauss::{integrate_segment, QuadratureResult};
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Half-width of the window integrated around each bump (`e^{-36}` tail).
pub const DEFAULT_TAIL_WINDOW: f64 = 6.0;

/// Upper bound `e^{-W²}/(2W)` for `∫_W^∞ e^{-t²} dt`.
pub fn gaussian_tail_mass<T: Real>(window: T) -> T {
    (-(window * window)).exp() / (window + window)
}

/// `∫_{-∞}^0 f(x) dx` for `f` concentrated in unit Gaussian bumps at `centers`.
///
/// Each bump contributes the quadrature over `[c - window, c + window]`
/// (overlapping windows are merged). Outside the windows `|f|` is assumed to
/// be dominated by `Σ_c |f(c)| e^{-(x-c)²}`, and that tail mass is added to
/// the error estimate. With no centers the integral is truncated to
/// `[-window, 0]` and `window·|f(-window)|` is reported as the (uncertified)
/// truncation error.
pub fn integrate_real_tail<T, F>(f: &F, centers: &[T], window: T, tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + ?Sized,
{
    integrate_bumps(f, centers, window, T::neg_infinity(), T::zero(), tol)
}

/// Bump-localized `∫_lo^hi f(x) dx`; `lo` may be `-∞`.
pub fn integrate_bumps<T, F>(f: &F, centers: &[T], window: T, lo: T, hi: T, tol: T) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + ?Sized,
{
    if !(window >= lit(3.0)) {
        return Err(Error::InvalidParameter("tail window must be at least 3".into()));
    }
    if !(tol > T::zero()) || !(hi > lo) {
        return Err(Error::InvalidParameter("need tol > 0 and lo < hi".into()));
    }
    let g = |z: Complex<T>| f(z.re);
    if centers.is_empty() {
        let a = if lo.is_finite() { lo } else { hi - window };
        let mut r = integrate_segment(&g, &Segment::line(Complex::from(a), Complex::from(hi)), tol)?;
        if !lo.is_finite() {
            r.abs_error_estimate = r.abs_error_estimate + window * f(a).norm();
        }
        return Ok(r);
    }

    let mut intervals: Vec<(T, T)> = centers
        .iter()
        .map(|&c| ((c - window).max(lo), (c + window).min(hi)))
        .filter(|(a, b)| b > a)
        .collect();
    intervals.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite window bounds"));
    let mut merged: Vec<(T, T)> = Vec::with_capacity(intervals.len());
    for (a, b) in intervals {
        match merged.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }

    let total_len = merged.iter().fold(T::zero(), |acc, (a, b)| acc + (*b - *a));
    let mut out = QuadratureResult {
        value: Complex::new(T::zero(), T::zero()),
        abs_error_estimate: T::zero(),
        evaluations: 0,
    };
    for (a, b) in &merged {
        let share = if total_len > T::zero() {
            (*b - *a) / total_len
        } else {
            T::one() / from_usize(merged.len())
        };
        let seg = Segment::line(Complex::from(*a), Complex::from(*b));
        let part = integrate_segment(&g, &seg, tol * share)?;
        out.value = out.value + part.value;
        out.abs_error_estimate = out.abs_error_estimate + part.abs_error_estimate;
        out.evaluations += part.evaluations;
    }
    let tail = gaussian_tail_mass(window) + gaussian_tail_mass(window);
    for &c in centers {
        out.abs_error_estimate = out.abs_error_estimate + f(c).norm() * tail;
        out.evaluations += 1;
    }
    Ok(out)
}
