use std::f64::consts::{FRAC_PI_4, LN_2};
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correction::real_stops;
use super::{grid_sup, AnalyticH, CertGrid, Field, FD_STEP};
use crate::error::{Error, Result};
use crate::numerics::wirtinger;
use crate::C64;

/// Where the extension is known to agree with the original `f`.
const ANALYTIC_FROM: f64 = LN_2 + 0.25;
/// Gradients below this are finite-difference noise; the stability ratio is
/// taken relative to at least this much.
const C_PHI_NOISE: f64 = 1e-8;

/// Certificate for `ũ = Im Φ` on `Ω_β` through `|ũ(x + iy)| ≤ |y| sup|∂h*|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjugateBound {
    /// `sup |h*′|` on the coarse grid, equal to `sup |w Φ′(w)|`.
    pub c_phi: f64,
    pub c_phi_at: [f64; 2],
    /// The same on the grid of half the spacing.
    pub c_phi_fine: f64,
    /// `|c_phi_fine − c_phi| / c_phi_fine`.
    pub stability: f64,
    /// `sup |ũ|` over both grids.
    pub sup_u_tilde: f64,
    /// `(β/2)·C_phi`.
    pub bound: f64,
    /// `sup |ũ|` on the real segment.
    pub axis_residual: f64,
}

impl ConjugateBound {
    pub fn holds(&self) -> bool {
        self.sup_u_tilde <= self.bound && self.axis_residual <= 1e-9
    }
}

/// `Φ(w) = h*(−log w)` with `h*(z) = (h(z) + conj h(conj z))/2`.
#[derive(Clone)]
pub struct ApproximantPhi {
    h: AnalyticH,
    pub beta: f64,
    pub m: usize,
    pub epsilon_achieved: f64,
    /// `Δ = bm`, where the approximation on the real axis starts.
    pub delta_threshold: f64,
    pub x_cert: f64,
    /// Smallest `x` with `|f − h*| ≤ π/4` on all of `[x, x_cert]`.
    pub x_star: Option<f64>,
    pub conjugate: ConjugateBound,
}

impl std::fmt::Debug for ApproximantPhi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ApproximantPhi")
            .field("m", &self.m)
            .field("epsilon_achieved", &self.epsilon_achieved)
            .field("delta_threshold", &self.delta_threshold)
            .field("x_star", &self.x_star)
            .field("conjugate", &self.conjugate)
            .finish()
    }
}

fn symmetric(h: &AnalyticH, z: C64) -> C64 {
    (h.eval(z) + h.eval(z.conj()).conj()) * 0.5
}

impl ApproximantPhi {
    pub fn analytic_h(&self) -> &AnalyticH {
        &self.h
    }

    /// `h*` on the strip.
    pub fn eval_strip(&self, z: C64) -> C64 {
        symmetric(&self.h, z)
    }

    /// `Φ(w)` on the sector.
    pub fn eval(&self, w: C64) -> C64 {
        self.eval_strip(-w.ln())
    }

    /// `ũ(w) = Im Φ(w)`.
    pub fn u_tilde(&self, w: C64) -> f64 {
        self.eval(w).im
    }

    /// `Φ` as a field on the strip.
    pub fn strip_field(&self) -> Field {
        let h = self.h.clone();
        Arc::new(move |z| symmetric(&h, z))
    }

    /// `|f(x) − h*(x)|`, with `f` the source on the real axis.
    pub fn axis_error(&self, x: f64) -> f64 {
        let z = C64::new(x, 0.0);
        (self.h.source(z) - self.eval_strip(z)).norm()
    }
}

fn conjugate_sweep(h: &AnalyticH, grid: &CertGrid) -> (f64, C64, f64) {
    let pts = grid.points();
    let hs = |z: C64| symmetric(h, z);
    let (c, at) = grid_sup(&pts, |z| wirtinger(&hs, z, FD_STEP).0.norm());
    let (u, _) = grid_sup(&pts, |z| hs(z).im.abs());
    (c, at, u)
}

/// Symmetrizes `h`, transports it to `Ω_β` and certifies the conjugate
/// bound on grids of spacing `resolution` and `resolution/2` over
/// `0 < x < x_cert`.
pub fn symmetrize_transport(h: &AnalyticH, beta: f64, resolution: f64) -> Result<ApproximantPhi> {
    if !(resolution > 0.0) {
        return Err(Error::InvalidParameter("resolution must be positive".into()));
    }
    let coarse = CertGrid::new(0.0, h.x_cert, beta / 2.0, resolution);
    let fine = CertGrid::new(0.0, h.x_cert, beta / 2.0, resolution / 2.0);
    let (c_phi, at, u1) = conjugate_sweep(h, &coarse);
    let (c_phi_fine, _, u2) = conjugate_sweep(h, &fine);
    let stops = real_stops(0.0, h.x_cert, resolution / 4.0);
    let axis_residual = stops
        .par_iter()
        .map(|&x| symmetric(h, C64::new(x, 0.0)).im.abs())
        .reduce(|| 0.0, f64::max);
    let c = c_phi.max(c_phi_fine);
    let conjugate = ConjugateBound {
        c_phi,
        c_phi_at: [at.re, at.im],
        c_phi_fine,
        stability: (c_phi_fine - c_phi).abs() / c_phi_fine.max(C_PHI_NOISE),
        sup_u_tilde: u1.max(u2),
        bound: 0.5 * beta * c,
        axis_residual,
    };
    let mut phi = ApproximantPhi {
        h: h.clone(),
        beta,
        m: h.scheme().m,
        epsilon_achieved: h.approx_error,
        delta_threshold: h.delta,
        x_cert: h.x_cert,
        x_star: None,
        conjugate,
    };
    // scan down from x_cert while the running sup stays within π/4
    let scan: Vec<f64> = real_stops(ANALYTIC_FROM, h.x_cert, resolution / 4.0);
    let errs: Vec<f64> = scan.par_iter().map(|&x| phi.axis_error(x)).collect();
    for (x, e) in scan.iter().zip(&errs).rev() {
        if *e <= FRAC_PI_4 {
            phi.x_star = Some(*x);
        } else {
            break;
        }
    }
    Ok(phi)
}
