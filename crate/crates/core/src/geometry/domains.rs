use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// `Ω_α^r = {|z| < r, |arg z| < α/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectorDomain<T> {
    alpha: T,
    r: T,
}

impl<T: Real> SectorDomain<T> {
    pub fn new(alpha: T, r: T) -> Result<Self> {
        if !(alpha > T::zero() && alpha <= T::PI()) {
            return Err(Error::InvalidParameter("sector opening must lie in (0, π]".into()));
        }
        if !(r > T::zero() && r <= T::one()) {
            return Err(Error::InvalidParameter("sector radius must lie in (0, 1]".into()));
        }
        Ok(Self { alpha, r })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn radius(&self) -> T {
        self.r
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        let n = z.norm();
        n > T::zero() && n < self.r && z.arg().abs() < self.alpha / lit(2.0)
    }
}

/// `Π_β^{x0} = {x > x0, |y| < β/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfStrip<T> {
    beta: T,
    x0: T,
}

impl<T: Real> HalfStrip<T> {
    pub fn new(beta: T, x0: T) -> Result<Self> {
        if !(beta > T::zero() && beta < T::PI()) {
            return Err(Error::InvalidParameter("strip width must lie in (0, π)".into()));
        }
        if !(x0 >= T::zero()) {
            return Err(Error::InvalidParameter("strip left edge must be nonnegative".into()));
        }
        Ok(Self { beta, x0 })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn left_edge(&self) -> T {
        self.x0
    }

    pub fn contains(&self, z: Complex<T>) -> bool {
        z.re > self.x0 && z.im.abs() < self.beta / lit(2.0)
    }

    /// The sector this strip corresponds to under `w = e^{-z}`.
    pub fn image_sector(&self) -> Result<SectorDomain<T>> {
        SectorDomain::new(self.beta, (-self.x0).exp())
    }
}

/// `w = e^{-z}`.
pub fn strip_to_sector<T: Real>(z: Complex<T>) -> Complex<T> {
    (-z).exp()
}

/// `z = -log w` (principal branch).
pub fn sector_to_strip<T: Real>(w: Complex<T>) -> Result<Complex<T>> {
    if w.norm() == T::zero() {
        return Err(Error::LogSingularity);
    }
    Ok(-w.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    type C = Complex<f64>;

    #[test]
    fn log_two_and_one_half() {
        let w = strip_to_sector(C::new(LN_2, 0.0));
        assert!((w - C::new(0.5, 0.0)).norm() < 1e-15);
        let z = sector_to_strip(C::new(0.5, 0.0)).unwrap();
        assert!((z.re - 0.693_147_180_559_945).abs() < 1e-14);
    }

    #[test]
    fn boundary_ray_maps_to_sector_edge() {
        let beta = PI / 2.0;
        for x in [0.1, 1.0, 3.0] {
            let w = strip_to_sector(C::new(x, beta / 2.0));
            assert!((w.arg() + beta / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_is_a_log_singularity() {
        assert!(matches!(sector_to_strip(C::new(0.0, 0.0)), Err(Error::LogSingularity)));
    }

    #[test]
    fn membership_is_exact() {
        let s = SectorDomain::new(PI / 3.0, 0.5).unwrap();
        assert!(s.contains(C::new(0.4, 0.0)));
        assert!(!s.contains(C::new(0.5, 0.0)));
        assert!(!s.contains(C::from_polar(0.3, PI / 6.0 + 1e-12)));
        assert!(s.contains(C::from_polar(0.3, PI / 6.0 - 1e-9)));
        let p = HalfStrip::new(PI / 2.0, LN_2).unwrap();
        assert!(p.contains(C::new(1.0, 0.7)));
        assert!(!p.contains(C::new(1.0, PI / 4.0)));
        assert!(!p.contains(C::new(LN_2, 0.0)));
        assert!(SectorDomain::new(0.0, 0.5).is_err());
        assert!(HalfStrip::new(PI, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn strip_sector_round_trip(x in 0.0f64..30.0, y in -1.5f64..1.5) {
            let z = C::new(x, y);
            let back = sector_to_strip(strip_to_sector(z)).unwrap();
            prop_assert!((back - z).norm() < 1e-12);
        }

        #[test]
        fn log_two_strip_is_half_sector(x in 0.7f64..20.0, y in -0.7f64..0.7) {
            let strip = HalfStrip::new(1.5, LN_2).unwrap();
            let sector = strip.image_sector().unwrap();
            let z = C::new(x, y);
            prop_assert_eq!(strip.contains(z), sector.contains(strip_to_sector(z)));
        }
    }
}
