use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::chebyshev::ChebyshevPoly;
use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, Real};

/// Grid size used to measure the fit error when none is given.
pub const DEFAULT_ERROR_SAMPLES: usize = 4001;

/// `⌈N^{3/2}⌉`, at least 1.
pub fn degree_for_lipschitz(n: f64) -> usize {
    (n.powf(1.5) - 1e-9).ceil().max(1.0) as usize
}

/// Fourier multipliers of the normalized kernel `(sin(nθ/2)/sin(θ/2))⁴`
/// with `n = ⌊d/2⌋ + 1`, so the kernel has degree at most `d`.
///
/// The square of the Fejér kernel has coefficients given by the
/// autocorrelation of the triangle `n − |j|`.
pub fn jackson_damping(d: usize) -> Vec<f64> {
    let n = (d / 2 + 1) as i64;
    let tri = |j: i64| if j.abs() < n { (n - j.abs()) as f64 } else { 0.0 };
    let coef = |k: i64| ((-n + 1)..n).map(|j| tri(j) * tri(k - j)).sum::<f64>();
    let b0 = coef(0);
    (0..=d as i64).map(|k| coef(k) / b0).collect()
}

/// Uniform samples of `φ` on `[-1, 1]` with their sampled Lipschitz constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzWitness {
    pub samples: Vec<f64>,
    pub lip_constant: f64,
}

impl LipschitzWitness {
    pub fn sample<F: Fn(f64) -> f64 + ?Sized>(phi: &F, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter("need at least two samples".into()));
        }
        let step = 2.0 / (points - 1) as f64;
        let samples: Vec<f64> = (0..points).map(|i| phi(-1.0 + i as f64 * step)).collect();
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let lip_constant = samples.windows(2).map(|w| (w[1] - w[0]).abs() / step).fold(0.0, f64::max);
        Ok(Self { samples, lip_constant })
    }

    pub fn step(&self) -> f64 {
        2.0 / (self.samples.len() - 1) as f64
    }

    /// Every consecutive difference is at most `n · step`.
    pub fn certifies(&self, n: f64) -> bool {
        let h = self.step();
        self.samples.windows(2).all(|w| (w[1] - w[0]).abs() <= n * h * (1.0 + 1e-12))
    }
}

/// A Jackson approximant together with its measured error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacksonFit<T> {
    pub poly: ChebyshevPoly<T>,
    /// Sup of `|φ − P|` over a uniform grid of `[-1, 1]`.
    pub sup_error: T,
    pub error_samples: usize,
}

/// `jackson_fit_with` using the default error grid.
pub fn jackson_fit<T, F>(phi: &F, n: T, degree_override: Option<usize>) -> Result<JacksonFit<T>>
where
    T: Real,
    F: Fn(T) -> T + ?Sized,
{
    jackson_fit_with(phi, n, degree_override, DEFAULT_ERROR_SAMPLES)
}

/// Convolves `θ ↦ φ(cos θ)` with the Jackson kernel and re-expands in `T_k`.
///
/// Chebyshev coefficients come from `4d` Chebyshev–Gauss nodes; the damping
/// factors are applied to `k ≥ 2` only, so that affine `φ` are reproduced
/// exactly.
pub fn jackson_fit_with<T, F>(phi: &F, n: T, degree_override: Option<usize>, error_samples: usize) -> Result<JacksonFit<T>>
where
    T: Real,
    F: Fn(T) -> T + ?Sized,
{
    if !(n > T::zero()) {
        return Err(Error::InvalidParameter("Lipschitz constant must be positive".into()));
    }
    let d = degree_override.unwrap_or_else(|| degree_for_lipschitz(n.to_f64().unwrap_or(f64::INFINITY)));
    let (theta, m) = nodes::<T>(d);
    let vals: Vec<T> = theta.iter().map(|&t| phi(t.cos())).collect();
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let poly = ChebyshevPoly::new(damped_coefficients(&theta, &vals, m, d));
    let sup_error = sup_error(phi, &poly, error_samples);
    Ok(JacksonFit { poly, sup_error, error_samples })
}

/// Jackson approximant of a complex-valued function: real and imaginary
/// parts fitted from one set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexJacksonFit<T> {
    pub re: ChebyshevPoly<T>,
    pub im: ChebyshevPoly<T>,
    /// Sup of `|φ − P|` over a uniform grid of `[-1, 1]`.
    pub sup_error: T,
}

impl<T: Real> ComplexJacksonFit<T> {
    pub fn degree(&self) -> usize {
        self.re.degree()
    }

    pub fn eval(&self, t: Complex<T>) -> Complex<T> {
        let a = self.re.eval_complex(t);
        let b = self.im.eval_complex(t);
        Complex::new(a.re - b.im, a.im + b.re)
    }

    /// `|P|` sup bound on `[-1, 1]` from the two parts.
    pub fn sup_bound(&self) -> T {
        self.re.sup_bound_on_i0() + self.im.sup_bound_on_i0()
    }
}

/// Complex version of [`jackson_fit_with`].
pub fn jackson_fit_complex<T, F>(
    phi: &F,
    n: T,
    degree_override: Option<usize>,
    error_samples: usize,
) -> Result<ComplexJacksonFit<T>>
where
    T: Real,
    F: Fn(T) -> Complex<T> + ?Sized,
{
    if !(n > T::zero()) {
        return Err(Error::InvalidParameter("Lipschitz constant must be positive".into()));
    }
    let d = degree_override.unwrap_or_else(|| degree_for_lipschitz(n.to_f64().unwrap_or(f64::INFINITY)));
    let (theta, m) = nodes::<T>(d);
    let vals: Vec<Complex<T>> = theta.iter().map(|&t| phi(t.cos())).collect();
    if vals.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    let re: Vec<T> = vals.iter().map(|v| v.re).collect();
    let im: Vec<T> = vals.iter().map(|v| v.im).collect();
    let mut fit = ComplexJacksonFit {
        re: ChebyshevPoly::new(damped_coefficients(&theta, &re, m, d)),
        im: ChebyshevPoly::new(damped_coefficients(&theta, &im, m, d)),
        sup_error: T::zero(),
    };
    let s = error_samples.max(2);
    fit.sup_error = (0..s)
        .map(|i| {
            let x = -T::one() + lit::<T>(2.0) * from_usize::<T>(i) / from_usize(s - 1);
            (phi(x) - fit.eval(Complex::new(x, T::zero()))).norm()
        })
        .fold(T::zero(), |a, b| a.max(b));
    Ok(fit)
}

/// `4d` Chebyshev–Gauss angles.
fn nodes<T: Real>(d: usize) -> (Vec<T>, usize) {
    let m = 4 * d.max(1);
    let theta = (0..m).map(|j| T::PI() * (from_usize::<T>(j) + lit(0.5)) / from_usize(m)).collect();
    (theta, m)
}

fn damped_coefficients<T: Real>(theta: &[T], vals: &[T], m: usize, d: usize) -> Vec<T> {
    let damp = jackson_damping(d);
    let mf: T = from_usize(m);
    (0..=d)
        .map(|k| {
            let kf: T = from_usize(k);
            let s = theta.iter().zip(vals).fold(T::zero(), |acc, (&t, &v)| acc + v * (kf * t).cos());
            let ck = if k == 0 { s / mf } else { s * lit(2.0) / mf };
            let rho: T = if k < 2 { T::one() } else { lit(damp[k]) };
            ck * rho
        })
        .collect()
}

/// `max |φ(x) − P(x)|` over `samples` equispaced points of `[-1, 1]`.
pub fn sup_error<T, F>(phi: &F, p: &ChebyshevPoly<T>, samples: usize) -> T
where
    T: Real,
    F: Fn(T) -> T + ?Sized,
{
    let s = samples.max(2);
    (0..s)
        .map(|i| {
            let x = -T::one() + lit::<T>(2.0) * from_usize::<T>(i) / from_usize(s - 1);
            (phi(x) - p.eval(x)).abs()
        })
        .fold(T::zero(), |a, b| a.max(b))
}
