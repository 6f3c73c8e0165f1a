use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Default finite-difference step relative to the local length scale.
pub const DEFAULT_RELATIVE_STEP: f64 = 1e-4;

/// Central-difference estimates of `(∂f, ∂̄f)` at `z` on the 4-point stencil
/// `z ± step`, `z ± i·step`.
pub fn wirtinger<T, F>(f: &F, z: Complex<T>, step: T) -> (Complex<T>, Complex<T>)
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let h = Complex::new(step, T::zero());
    let ih = Complex::new(T::zero(), step);
    let two_h = step + step;
    let fx = (f(z + h) - f(z - h)) / two_h;
    let fy = (f(z + ih) - f(z - ih)) / two_h;
    let i = Complex::new(T::zero(), T::one());
    let half: T = lit(0.5);
    ((fx - i * fy) * half, (fx + i * fy) * half)
}

/// As [`wirtinger`], but refuses stencils that leave the caller's domain.
pub fn wirtinger_in<T, F, D>(f: &F, z: Complex<T>, step: T, inside: &D) -> Result<(Complex<T>, Complex<T>)>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
    D: Fn(Complex<T>) -> bool + ?Sized,
{
    if !(step > T::zero()) {
        return Err(Error::InvalidParameter("finite-difference step must be positive".into()));
    }
    let h = Complex::new(step, T::zero());
    let ih = Complex::new(T::zero(), step);
    for p in [z + h, z - h, z + ih, z - ih] {
        if !inside(p) {
            return Err(Error::StencilOutOfDomain {
                re: to_f64(p.re),
                im: to_f64(p.im),
            });
        }
    }
    Ok(wirtinger(f, z, step))
}

/// Lipschitz density `|∂f| + |∂̄f|` (operator norm of the real Jacobian).
pub fn gradient_norm<T, F>(f: &F, z: Complex<T>, step: T) -> T
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let (d, db) = wirtinger(f, z, step);
    d.norm() + db.norm()
}
