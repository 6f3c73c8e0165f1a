use std::f64::consts::LN_2;
use std::sync::Arc;

use super::{grid_sup, CertGrid, Field, FD_STEP};
use crate::error::{Error, Result};
use crate::geometry::build_psi_beta;
use crate::numerics::wirtinger;
use crate::operator::SpiralMap;
use crate::C64;

/// Analytic `F` on `Ω_α^{1/2}` with a sampled constant `C_F` in
/// `|∂F(w)| ≤ C_F / |w|`.
#[derive(Clone)]
pub struct BlochFunction {
    name: String,
    alpha: f64,
    eval: Field,
    deriv: Option<Field>,
    c_f: f64,
}

impl std::fmt::Debug for BlochFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlochFunction").field("name", &self.name).field("alpha", &self.alpha).field("c_f", &self.c_f).finish()
    }
}

/// Strip window on which `C_F` is sampled: `log 2 < x < log 2 + 30`.
const CERT_DEPTH: f64 = 30.0;

impl BlochFunction {
    /// Wraps `eval` (and optionally its derivative) and samples `C_F`.
    pub fn new(name: impl Into<String>, alpha: f64, eval: Field, deriv: Option<Field>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < std::f64::consts::PI) {
            return Err(Error::InvalidParameter("alpha must lie in (0, π)".into()));
        }
        let mut f = Self { name: name.into(), alpha, eval, deriv, c_f: 0.0 };
        f.c_f = f.sample_constant(0.1);
        if !f.c_f.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c_f(&self) -> f64 {
        self.c_f
    }

    pub fn eval(&self, w: C64) -> C64 {
        (self.eval)(w)
    }

    pub fn field(&self) -> Field {
        self.eval.clone()
    }

    pub fn derivative(&self, w: C64) -> C64 {
        match &self.deriv {
            Some(d) => d(w),
            None => wirtinger(&*self.eval, w, FD_STEP * w.norm()).0,
        }
    }

    /// `sup |w F′(w)|` over a strip grid of `Ω_α^{1/2}` (uniform in `−log w`).
    pub fn sample_constant(&self, resolution: f64) -> f64 {
        let grid = CertGrid::new(LN_2, LN_2 + CERT_DEPTH, self.alpha / 2.0, resolution);
        grid_sup(&grid.points(), |z| {
            let w = (-z).exp();
            (self.derivative(w) * w).norm()
        })
        .0
    }

    /// `F*(w) = (F(w) + conj F(conj w)) / 2`, real on the real axis.
    pub fn symmetrized(&self) -> Result<Self> {
        let f = self.eval.clone();
        let eval: Field = Arc::new(move |w: C64| (f(w) + f(w.conj()).conj()) * 0.5);
        let deriv: Option<Field> = self.deriv.clone().map(|d| -> Field {
            Arc::new(move |w: C64| (d(w) + d(w.conj()).conj()) * 0.5)
        });
        Self::new(format!("{}*", self.name), self.alpha, eval, deriv)
    }

    pub fn constant(alpha: f64, c: C64) -> Result<Self> {
        Self::new("constant", alpha, Arc::new(move |_| c), Some(Arc::new(|_| C64::new(0.0, 0.0))))
    }

    /// `F(w) = log w`, `C_F = 1`.
    pub fn log(alpha: f64) -> Result<Self> {
        Self::new("log", alpha, Arc::new(|w: C64| w.ln()), Some(Arc::new(|w: C64| w.inv())))
    }

    pub fn identity(alpha: f64) -> Result<Self> {
        Self::new("identity", alpha, Arc::new(|w| w), Some(Arc::new(|_| C64::new(1.0, 0.0))))
    }

    /// `F = −i log φ′ ∘ ψ_β` for the spiral map, i.e. `(c + i) log(1 − ψ_β)`,
    /// so that `Re F(t) = arg φ′(ψ_β(t))` on the real axis.
    pub fn spiral(alpha: f64, beta: f64, c: f64) -> Result<Self> {
        if !(alpha < beta) {
            return Err(Error::InvalidParameter("need alpha < beta".into()));
        }
        let map = SpiralMap::new(c)?;
        let psi = Arc::new(build_psi_beta(beta)?);
        let k = C64::new(0.0, -1.0);
        let p1 = psi.clone();
        let eval: Field = Arc::new(move |w: C64| k * map.log_dphi_from_complement(p1.one_minus(w)));
        let p2 = psi;
        let deriv: Field = Arc::new(move |w: C64| {
            // d/dw log(1−ψ) = −ψ′/(1−ψ)
            k * C64::new(-1.0, c) * (-p2.derivative(w) / p2.one_minus(w))
        });
        Self::new(format!("spiral(c={c})"), alpha, eval, Some(deriv))
    }
}
