use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::wirtinger;
use crate::scalar::{lit, Real};

/// One elementary analytic map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Stage<T> {
    /// `z ↦ u z`.
    Rotation(Complex<T>),
    /// Principal branch of `z^p`.
    Power(T),
    /// `(a z + b) / (c z + d)`.
    Mobius { a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T> },
    Square,
    Exp,
    Log,
    /// `e^{iθ} (z − a) / (1 − ā z)` with `|a| < 1`.
    DiskAutomorphism { a: Complex<T>, theta: T },
}

impl<T: Real> Stage<T> {
    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        match *self {
            Stage::Rotation(u) => u * z,
            Stage::Power(p) => principal_pow(z, p),
            Stage::Mobius { a, b, c, d } => (a * z + b) / (c * z + d),
            Stage::Square => z * z,
            Stage::Exp => z.exp(),
            Stage::Log => z.ln(),
            Stage::DiskAutomorphism { a, theta } => {
                Complex::from_polar(T::one(), theta) * (z - a) / (Complex::from(T::one()) - a.conj() * z)
            }
        }
    }

    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        match *self {
            Stage::Rotation(u) => u,
            Stage::Power(p) => principal_pow(z, p - T::one()) * p,
            Stage::Mobius { a, b, c, d } => {
                let den = c * z + d;
                (a * d - b * c) / (den * den)
            }
            Stage::Square => z * lit::<T>(2.0),
            Stage::Exp => z.exp(),
            Stage::Log => z.inv(),
            Stage::DiskAutomorphism { a, theta } => {
                let den = Complex::from(T::one()) - a.conj() * z;
                Complex::from_polar(T::one(), theta) * (T::one() - a.norm_sqr()) / (den * den)
            }
        }
    }

    /// Inverse on the principal branch. Valid whenever the forward stage was
    /// applied to a set on which that branch is injective.
    pub fn inverse(&self, w: Complex<T>) -> Complex<T> {
        match *self {
            Stage::Rotation(u) => w / u,
            Stage::Power(p) => principal_pow(w, T::one() / p),
            Stage::Mobius { a, b, c, d } => (d * w - b) / (a - c * w),
            Stage::Square => w.sqrt(),
            Stage::Exp => w.ln(),
            Stage::Log => w.exp(),
            Stage::DiskAutomorphism { a, theta } => {
                let v = w * Complex::from_polar(T::one(), -theta);
                (v + a) / (Complex::from(T::one()) + a.conj() * v)
            }
        }
    }
}

fn principal_pow<T: Real>(z: Complex<T>, p: T) -> Complex<T> {
    let r = z.norm();
    if r == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    Complex::from_polar(r.powf(p), z.arg() * p)
}

/// Result of sampling a chain for collisions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub samples: usize,
    pub min_separation: f64,
    pub collisions: usize,
}

/// Composition of elementary stages, applied left to right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformalChain<T> {
    pub stages: Vec<Stage<T>>,
    pub domain: String,
    pub range: String,
}

impl<T: Real> ConformalChain<T> {
    pub fn new(stages: Vec<Stage<T>>, domain: impl Into<String>, range: impl Into<String>) -> Self {
        Self { stages, domain: domain.into(), range: range.into() }
    }

    pub fn eval(&self, z: Complex<T>) -> Complex<T> {
        self.stages.iter().fold(z, |acc, s| s.eval(acc))
    }

    /// Value and derivative by the chain rule.
    pub fn eval_with_derivative(&self, z: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut v = z;
        let mut d = Complex::from(T::one());
        for s in &self.stages {
            d = d * s.derivative(v);
            v = s.eval(v);
        }
        (v, d)
    }

    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        self.eval_with_derivative(z).1
    }

    pub fn inverse(&self, w: Complex<T>) -> Complex<T> {
        self.stages.iter().rev().fold(w, |acc, s| s.inverse(acc))
    }

    /// Largest finite-difference `|∂̄|` of the composition over `samples`.
    pub fn conformality_defect(&self, samples: &[Complex<T>], step: T) -> f64 {
        samples
            .iter()
            .map(|&z| wirtinger(&|u| self.eval(u), z, step).1.norm().to_f64().unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    /// Counts pairs of distinct samples whose images lie within `tol`.
    pub fn injectivity_probe(&self, samples: &[Complex<T>], tol: f64) -> InjectivityReport {
        let mut img: Vec<(f64, f64, usize)> = samples
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                let w = self.eval(z);
                (w.re.to_f64().unwrap_or(f64::NAN), w.im.to_f64().unwrap_or(f64::NAN), i)
            })
            .collect();
        img.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut min_sep = f64::INFINITY;
        let mut collisions = 0;
        // sweep with a window wide enough to see the nearest neighbour up to `tol`
        for i in 0..img.len() {
            for j in (i + 1)..img.len() {
                let dx = img[j].0 - img[i].0;
                if dx > tol.max(min_sep.min(1e-3)) {
                    break;
                }
                let d = dx.hypot(img[j].1 - img[i].1);
                let zi = samples[img[i].2];
                let zj = samples[img[j].2];
                if zi == zj {
                    continue;
                }
                min_sep = min_sep.min(d);
                if d <= tol {
                    collisions += 1;
                }
            }
        }
        InjectivityReport { samples: samples.len(), min_separation: min_sep, collisions }
    }
}

/// The Riemann map of the sector `Ω_β` onto the unit disk normalized by
/// `ψ(1/2) = 0`, `ψ(0) = 1`.
///
/// Stages: `e^{iβ/2} w` (upper sector), `^(π/β)` (upper half disk),
/// `(1+ζ)/(1−ζ)` (first quadrant), square (upper half plane),
/// `(iτ+1)/(τ+i)` (disk, `0 ↦ 1`), then a real automorphism fixing 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiBeta<T> {
    beta: T,
    a: T,
    chain: ConformalChain<T>,
}

/// Builds `ψ_β` and solves for the automorphism that sends `1/2` to `0`.
pub fn build_psi_beta<T: Real>(beta: T) -> Result<PsiBeta<T>> {
    if !(beta > T::zero() && beta < T::PI()) {
        return Err(Error::InvalidParameter("beta must lie in (0, π)".into()));
    }
    let one = Complex::from(T::one());
    let i = Complex::new(T::zero(), T::one());
    let mut stages = vec![
        Stage::Rotation(Complex::from_polar(T::one(), beta / lit(2.0))),
        Stage::Power(T::PI() / beta),
        Stage::Mobius { a: one, b: one, c: -one, d: one },
        Stage::Square,
        Stage::Mobius { a: i, b: one, c: one, d: i },
    ];
    let pre = ConformalChain::new(stages.clone(), "sector", "disk");
    let k = pre.eval(Complex::from(lit::<T>(0.5)));
    let tol: T = T::epsilon().sqrt();
    if !(k.im.abs() <= tol && k.re.abs() < T::one()) {
        return Err(Error::AutomorphismFit(format!("image of 1/2 is {:?}", k)));
    }
    let a = k.re;
    stages.push(Stage::DiskAutomorphism { a: Complex::new(a, T::zero()), theta: T::zero() });
    let chain = ConformalChain::new(stages, "sector", "disk");
    Ok(PsiBeta { beta, a, chain })
}

impl<T: Real> PsiBeta<T> {
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Real parameter of the final automorphism.
    pub fn automorphism_parameter(&self) -> T {
        self.a
    }

    pub fn chain(&self) -> &ConformalChain<T> {
        &self.chain
    }

    pub fn eval(&self, w: Complex<T>) -> Complex<T> {
        if w.norm() == T::zero() {
            return Complex::from(T::one());
        }
        self.chain.eval(w)
    }

    pub fn derivative(&self, w: Complex<T>) -> Complex<T> {
        self.chain.derivative(w)
    }

    /// `1 − ψ(w)` without cancellation near `w = 0`.
    pub fn one_minus(&self, w: Complex<T>) -> Complex<T> {
        let one = Complex::from(T::one());
        let i = Complex::new(T::zero(), T::one());
        let two: T = lit(2.0);
        let q = principal_pow(w, T::PI() / self.beta);
        let u = one - i * q;
        let sigma = (one + i * q) / u;
        let tau = sigma * sigma;
        // τ − 1 = 4iq/(1−iq)², 1 − κ = (1−i)(τ−1)/(τ+i)
        let tau_m1 = i * q * (two * two) / (u * u);
        let one_m_kappa = (one - i) * tau_m1 / (tau + i);
        let kappa = one - one_m_kappa;
        let a = Complex::from(self.a);
        (one + a) * one_m_kappa / (one - a * kappa)
    }

    /// Inverse map written in terms of `δ = 1 − t`, so that points of the
    /// disk close to 1 come back accurately near the vertex.
    pub fn inverse_from_complement(&self, delta: Complex<T>) -> Complex<T> {
        let one = Complex::from(T::one());
        let i = Complex::new(T::zero(), T::one());
        let a = Complex::from(self.a);
        let t = one - delta;
        let one_m_kappa = (one - a) * delta / (one + a * t);
        let kappa = one - one_m_kappa;
        let tau_m1 = (one + i) * one_m_kappa / (kappa - i);
        let tau = one + tau_m1;
        let sigma = tau.sqrt();
        let sigma_m1 = tau_m1 / (sigma + one);
        let zeta = sigma_m1 / (sigma + one);
        let q = -i * zeta;
        principal_pow(q, self.beta / T::PI())
    }

    pub fn inverse(&self, t: Complex<T>) -> Complex<T> {
        self.inverse_from_complement(Complex::from(T::one()) - t)
    }

    /// `sup |w ψ′(w)| / |1 − ψ(w)|` over a polar grid of `Ω_β`.
    pub fn distortion_constant(&self, radial: usize, angular: usize) -> f64 {
        let mut best = 0.0f64;
        let half: T = self.beta / lit(2.0);
        for i in 1..=radial {
            // radii spread geometrically toward the vertex and linearly toward the arc
            let s = i as f64 / (radial + 1) as f64;
            let r: T = lit(if s < 0.5 { (2.0 * s).powi(6) * 0.5 } else { s });
            for j in 1..=angular {
                let th: T = half * lit::<T>(2.0 * j as f64 / (angular + 1) as f64 - 1.0);
                let w = Complex::from_polar(r, th);
                let num = (w * self.derivative(w)).norm();
                let den = self.one_minus(w).norm();
                if den > T::zero() {
                    best = best.max((num / den).to_f64().unwrap_or(f64::INFINITY));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    fn sector_grid(beta: f64, n: usize) -> Vec<C> {
        let mut v = Vec::new();
        for i in 1..n {
            let r = 0.98 * i as f64 / n as f64;
            for j in 1..n {
                let th = beta * (j as f64 / n as f64 - 0.5) * 0.98;
                v.push(C::from_polar(r, th));
            }
        }
        v
    }

    #[test]
    fn normalization() {
        for beta in [0.3, PI / 2.0, 1.0, 2.5] {
            let psi = build_psi_beta(beta).unwrap();
            assert!(psi.eval(C::new(0.5, 0.0)).norm() < 1e-10, "beta={beta}");
            assert!((psi.eval(C::new(1e-9, 0.0)) - 1.0).norm() < 1e-6);
            let ends = psi.eval(C::new(1.0, 0.0));
            assert!((ends + 1.0).norm() < 1e-10);
        }
    }

    #[test]
    fn real_segment_maps_to_real_diameter_decreasingly() {
        let psi = build_psi_beta(PI / 2.0).unwrap();
        let mut prev = 1.0;
        for i in 1..100 {
            let v = psi.eval(C::new(i as f64 / 100.0, 0.0));
            assert!(v.im.abs() < 1e-12);
            assert!(v.re < prev && v.re > -1.0);
            prev = v.re;
        }
    }

    #[test]
    fn maps_into_disk_and_inverts() {
        let beta = 1.2;
        let psi = build_psi_beta(beta).unwrap();
        for w in sector_grid(beta, 20) {
            let t = psi.eval(w);
            assert!(t.norm() < 1.0);
            assert!((psi.inverse(t) - w).norm() < 1e-10);
            assert!((psi.chain().inverse(t) - w).norm() < 1e-10);
        }
    }

    #[test]
    fn complement_is_accurate_near_vertex() {
        let psi = build_psi_beta(PI / 2.0).unwrap();
        // 1 − ψ(w) behaves like C w² near the vertex
        let w1 = C::new(1e-6, 1e-7);
        let w2 = w1 * 0.5;
        let ratio = psi.one_minus(w1) / psi.one_minus(w2);
        assert!((ratio - 4.0).norm() < 1e-5);
        let w = C::new(1e-30, -2e-31);
        let back = psi.inverse_from_complement(psi.one_minus(w));
        assert!((back - w).norm() / w.norm() < 1e-12);
        for w in sector_grid(PI / 2.0, 10) {
            assert!((psi.one_minus(w) - (1.0 - psi.eval(w))).norm() < 1e-12);
        }
    }

    #[test]
    fn chain_rule_matches_finite_differences() {
        let psi = build_psi_beta(0.9).unwrap();
        let grid = sector_grid(0.9, 12);
        assert!(psi.chain().conformality_defect(&grid, 1e-5) < 1e-6);
        for &w in &grid {
            let (dz, _) = wirtinger(&|u| psi.eval(u), w, 1e-5);
            assert!((dz - psi.derivative(w)).norm() < 1e-6 * (1.0 + dz.norm()));
        }
    }

    #[test]
    fn injective_on_a_grid() {
        let psi = build_psi_beta(PI / 2.0).unwrap();
        let rep = psi.chain().injectivity_probe(&sector_grid(PI / 2.0, 60), 1e-9);
        assert_eq!(rep.collisions, 0);
        assert!(rep.min_separation > 1e-9);
    }

    #[test]
    fn distortion_constant_is_finite_and_at_least_the_exponent() {
        let beta = PI / 2.0;
        let psi = build_psi_beta(beta).unwrap();
        let c = psi.distortion_constant(80, 40);
        // near the vertex the ratio tends to π/β
        assert!(c >= 2.0 - 1e-3 && c < 10.0, "{c}");
    }

    #[test]
    fn single_precision_chain() {
        let psi = build_psi_beta(std::f32::consts::FRAC_PI_2).unwrap();
        assert!(psi.eval(Complex::new(0.5f32, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn rejects_bad_beta() {
        assert!(build_psi_beta(0.0).is_err());
        assert!(build_psi_beta(PI).is_err());
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(r in 0.01f64..0.99, s in -0.99f64..0.99, beta in 0.2f64..3.0) {
            let psi = build_psi_beta(beta).unwrap();
            let w = C::from_polar(r, s * beta / 2.0);
            let lhs = psi.eval(w.conj());
            let rhs = psi.eval(w).conj();
            prop_assert!((lhs - rhs).norm() < 1e-10);
            prop_assert!(psi.eval(w).norm() < 1.0 + 1e-12);
        }
    }
}
