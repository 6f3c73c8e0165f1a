use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// `φ(z) = (1 − (1−z)^{ic}) / (ic)`, with `φ′(z) = (1−z)^{−1+ic}`.
///
/// Along `[0, 1)` the substitution `s = log 1/(1−t)` turns `φ′ dt` into
/// `e^{−ics} ds`, so the image of the radius spirals with infinite length
/// while `φ` stays bounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralMap {
    c: f64,
}

impl SpiralMap {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 0.5) {
            return Err(Error::InvalidParameter("spiral parameter c must lie in (0, 1/2]".into()));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    fn exponent(&self) -> C64 {
        C64::new(-1.0, self.c)
    }

    pub fn phi(&self, z: C64) -> C64 {
        let ic = C64::new(0.0, self.c);
        (C64::new(1.0, 0.0) - (ic * (1.0 - z).ln()).exp()) / ic
    }

    pub fn dphi(&self, z: C64) -> C64 {
        (self.exponent() * (1.0 - z).ln()).exp()
    }

    pub fn d2phi(&self, z: C64) -> C64 {
        -self.exponent() * self.dphi(z) / (1.0 - z)
    }

    /// `log φ′` written through `δ = 1 − z`.
    pub fn log_dphi_from_complement(&self, delta: C64) -> C64 {
        self.exponent() * delta.ln()
    }

    pub fn log_dphi(&self, z: C64) -> C64 {
        self.log_dphi_from_complement(1.0 - z)
    }

    /// `φ′(t) = e^{−ics}/(1−t)` on the real radius in terms of `s`.
    pub fn arg_dphi_real(&self, s: f64) -> f64 {
        -self.c * s
    }

    /// The map is injective exactly on `|z| < tanh(π/c)`: two points of a
    /// ray from 1 collide once `|1−z|` varies by the factor `e^{2π/c}`.
    pub fn univalent_radius(&self) -> f64 {
        (std::f64::consts::PI / self.c).tanh()
    }

    /// `sup |φ|` over the disk, `(1 + e^{cπ/2}) / c`.
    pub fn disk_bound(&self) -> f64 {
        (1.0 + (self.c * std::f64::consts::FRAC_PI_2).exp()) / self.c
    }
}
