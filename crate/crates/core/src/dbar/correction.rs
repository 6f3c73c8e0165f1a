use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::partition::partition_weights;
use super::{grid_sup, CertGrid, Field, PartitionOfUnity, FD_STEP};
use crate::error::{Error, Result};
use crate::numerics::{gradient_norm, wirtinger};
use crate::polyapprox::{growth_bound_check, jackson_fit_complex, ComplexJacksonFit};
use crate::C64;

/// Half-width of the `k`-window used when evaluating `H₀`, `g` and `h`.
///
/// Wider than the certified partition window so that the dropped terms
/// (`≤ e^{−26²}` times a polynomial of moderate degree) stay far below
/// rounding, which keeps the assembled functions continuous where the window
/// shifts.
pub const DEFAULT_EVAL_WINDOW: usize = 26;

/// Error samples per local fit.
const FIT_ERROR_SAMPLES: usize = 2001;
/// Refuse fits whose degree would exceed this.
const MAX_DEGREE: usize = 20_000;

struct H0Inner {
    h: Field,
    b: f64,
    eval_window: usize,
    samples: Vec<C64>,
}

impl H0Inner {
    fn sample(&self, k: usize) -> C64 {
        match self.samples.get(k) {
            Some(&v) => v,
            None => (self.h)(C64::new(self.b * k as f64, 0.0)),
        }
    }

    fn smooth_part(&self, z: C64) -> C64 {
        let w = partition_weights(z, self.b, self.eval_window);
        w.e.iter().enumerate().map(|(i, &e)| e * self.sample(w.lo + i)).sum()
    }

    fn eval(&self, z: C64) -> C64 {
        (self.h)(z) - self.smooth_part(z)
    }
}

/// `H₀ = Σ_k e_k (H − H(bk)) = H − Σ_k e_k H(bk)`.
#[derive(Clone)]
pub struct FirstModification {
    inner: Arc<H0Inner>,
    /// Sampled `sup |∇H₀|`.
    pub c6: f64,
    /// Sampled `sup |H₀|`.
    pub c7: f64,
    /// Sampled `sup |∂̄H − ∂̄H₀|`.
    pub dbar_residual: f64,
    pub grid: CertGrid,
}

impl std::fmt::Debug for FirstModification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FirstModification")
            .field("b", &self.inner.b)
            .field("c6", &self.c6)
            .field("c7", &self.c7)
            .field("dbar_residual", &self.dbar_residual)
            .finish()
    }
}

impl FirstModification {
    pub fn b(&self) -> f64 {
        self.inner.b
    }

    pub fn eval_window(&self) -> usize {
        self.inner.eval_window
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.inner.eval(z)
    }

    /// `H` itself.
    pub fn source(&self, z: C64) -> C64 {
        (self.inner.h)(z)
    }

    /// `H(bk)`.
    pub fn sample(&self, k: usize) -> C64 {
        self.inner.sample(k)
    }

    pub fn field(&self) -> Field {
        let inner = self.inner.clone();
        Arc::new(move |z| inner.eval(z))
    }
}

/// Builds `H₀` and measures `C₆`, `C₇` and the `∂̄` residual on `grid`.
pub fn build_h0(h: Field, pou: &PartitionOfUnity, eval_window: usize, grid: &CertGrid) -> Result<FirstModification> {
    let b = pou.b;
    let cached = (3.0 * grid.x_hi / b).ceil() as usize + 2 * eval_window + 2;
    let samples: Vec<C64> = (0..cached).into_par_iter().map(|k| h(C64::new(b * k as f64, 0.0))).collect();
    if samples.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let inner = Arc::new(H0Inner { h: h.clone(), b, eval_window, samples });
    let pts = grid.points();
    let (c7, _) = grid_sup(&pts, |z| inner.eval(z).norm());
    let f0 = |z: C64| inner.eval(z);
    let (c6, _) = grid_sup(&pts, |z| gradient_norm(&f0, z, FD_STEP));
    let (dbar_residual, _) = grid_sup(&pts, |z| (wirtinger(&*h, z, FD_STEP).1 - wirtinger(&f0, z, FD_STEP).1).norm());
    Ok(FirstModification { inner, c6, c7, dbar_residual, grid: *grid })
}

struct SchemeInner {
    h0: FirstModification,
    m: usize,
    polys: Vec<ComplexJacksonFit<f64>>,
}

impl SchemeInner {
    fn b(&self) -> f64 {
        self.h0.b()
    }

    fn local(&self, j: usize, z: C64) -> C64 {
        let t = (z - self.b() * j as f64) / (self.b() * self.m as f64);
        match self.polys.get(j) {
            Some(p) => p.eval(t),
            None => C64::new(f64::NAN, f64::NAN),
        }
    }

    fn correction_sum(&self, z: C64) -> C64 {
        let w = partition_weights(z, self.b(), self.h0.eval_window());
        w.e.iter().enumerate().map(|(i, &e)| e * self.local(w.lo + i, z)).sum()
    }

    fn g(&self, z: C64) -> C64 {
        self.h0.eval(z) - self.correction_sum(z)
    }

    fn h(&self, z: C64) -> C64 {
        let w = partition_weights(z, self.b(), self.h0.eval_window());
        w.e.iter()
            .enumerate()
            .map(|(i, &e)| {
                let k = w.lo + i;
                e * (self.h0.sample(k) + self.local(k, z))
            })
            .sum()
    }
}

/// Local Chebyshev fits `𝒫_k ≈ (t ↦ H₀(btm + bk))` on `[-1, 1]`.
#[derive(Clone)]
pub struct CorrectionScheme {
    inner: Arc<SchemeInner>,
    pub m: usize,
    pub b: f64,
    /// `λ = (C₆ b)^{3/2}`, so that `deg 𝒫_k = ⌈λ m^{3/2}⌉`.
    pub lambda_cap: f64,
    pub degree: usize,
    /// Lipschitz constant `C₆·b·m` of each local datum.
    pub lipschitz: f64,
    /// Measured sup error of each fit on `|x − bk| ≤ bm`.
    pub fit_errors: Vec<f64>,
    /// `max_k err_k · √m`.
    pub fit_constant: f64,
}

impl std::fmt::Debug for CorrectionScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorrectionScheme")
            .field("m", &self.m)
            .field("b", &self.b)
            .field("lambda_cap", &self.lambda_cap)
            .field("degree", &self.degree)
            .field("polys", &self.inner.polys.len())
            .field("fit_constant", &self.fit_constant)
            .finish()
    }
}

impl CorrectionScheme {
    pub fn h0(&self) -> &FirstModification {
        &self.inner.h0
    }

    pub fn poly(&self, k: usize) -> Option<&ComplexJacksonFit<f64>> {
        self.inner.polys.get(k)
    }

    pub fn poly_count(&self) -> usize {
        self.inner.polys.len()
    }

    /// `𝒫_j((z − bj)/(bm))`.
    pub fn local(&self, j: usize, z: C64) -> C64 {
        self.inner.local(j, z)
    }

    /// Largest `x` at which every term of the evaluation window has a fit.
    pub fn x_max(&self) -> f64 {
        let n = self.inner.polys.len();
        let w = self.h0().eval_window();
        self.b * (n.saturating_sub(w + 1)) as f64 - 0.5 * self.b
    }
}

/// Fits `𝒫_k` for every `k` whose window can reach `x ≤ x_max`.
pub fn fit_local_polys(h0: &FirstModification, m: usize, x_max: f64) -> Result<CorrectionScheme> {
    if m < 2 {
        return Err(Error::InvalidParameter("m must be at least 2".into()));
    }
    let b = h0.b();
    let lambda_cap = (h0.c6 * b).powf(1.5);
    let lipschitz = (h0.c6 * b * m as f64).max(1.0);
    let degree = (lambda_cap * (m as f64).powf(1.5)).ceil().max(1.0) as usize;
    if degree > MAX_DEGREE {
        return Err(Error::InvalidParameter(format!("local degree {degree} exceeds {MAX_DEGREE}")));
    }
    // near the origin the window is pinned at 0..=2W
    let w = h0.eval_window();
    let count = ((x_max / b).ceil().max(0.0) as usize + w + 2).max(2 * w + 1);
    let mf = m as f64;
    let polys = (0..count)
        .into_par_iter()
        .map(|k| {
            let phi = |t: f64| h0.eval(C64::new(b * t * mf + b * k as f64, 0.0));
            jackson_fit_complex(&phi, lipschitz, Some(degree), FIT_ERROR_SAMPLES)
        })
        .collect::<Result<Vec<_>>>()?;
    let fit_errors: Vec<f64> = polys.iter().map(|p| p.sup_error).collect();
    let fit_constant = fit_errors.iter().fold(0.0f64, |a, &e| a.max(e)) * mf.sqrt();
    Ok(CorrectionScheme {
        inner: Arc::new(SchemeInner { h0: h0.clone(), m, polys }),
        m,
        b,
        lambda_cap,
        degree,
        lipschitz,
        fit_errors,
        fit_constant,
    })
}

/// Partial sums of `g(x) = Σ_j e_j(x)(H₀(x) − 𝒫_j)` on the real axis:
/// `Σ₁` over the fit windows `|x − bj| ≤ bm`, `Σ₂` over `bm < |x − bj| ≤ 2bm`,
/// `Σ₃` over the rest. Each field is a sup over `[bm, x_cert]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaSplit {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

/// `g = H₀ − Σ_j e_j 𝒫_j((z − bj)/(bm))`, so that `∂̄g = ∂̄H₀`.
#[derive(Clone)]
pub struct Correction {
    scheme: CorrectionScheme,
    /// `ε(m) = sup |g(x)|` over `[bm, x_cert]`.
    pub epsilon: f64,
    pub epsilon_at: f64,
    pub x_cert: f64,
    /// Sampled `sup |∂g|` on the grid.
    pub c4: f64,
    /// Sampled `sup |∂̄g − ∂̄H₀|`.
    pub dbar_residual: f64,
    pub sigma: SigmaSplit,
    /// Growth-bound checks on the terms with `|x − bj| > bm`.
    pub growth_checks: usize,
    pub growth_violations: usize,
    pub grid: CertGrid,
}

impl std::fmt::Debug for Correction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Correction")
            .field("epsilon", &self.epsilon)
            .field("epsilon_at", &self.epsilon_at)
            .field("c4", &self.c4)
            .field("dbar_residual", &self.dbar_residual)
            .field("sigma", &self.sigma)
            .field("growth_violations", &self.growth_violations)
            .finish()
    }
}

impl Correction {
    pub fn scheme(&self) -> &CorrectionScheme {
        &self.scheme
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.scheme.inner.g(z)
    }

    pub fn field(&self) -> Field {
        let inner = self.scheme.inner.clone();
        Arc::new(move |z| inner.g(z))
    }
}

/// Real-axis stops on `[lo, hi]` with spacing at most `step`.
pub(crate) fn real_stops(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

fn split_at(s: &SchemeInner, x: f64) -> ([C64; 3], usize, usize) {
    let z = C64::new(x, 0.0);
    let b = s.b();
    let bm = b * s.m as f64;
    let w = partition_weights(z, b, s.h0.eval_window());
    let h0 = s.h0.eval(z);
    let mut parts = [C64::new(0.0, 0.0); 3];
    let (mut checks, mut bad) = (0, 0);
    for (i, &e) in w.e.iter().enumerate() {
        let j = w.lo + i;
        let d = (x - b * j as f64).abs();
        let slot = if d <= bm {
            0
        } else if d <= 2.0 * bm {
            1
        } else {
            2
        };
        parts[slot] += e * (h0 - s.local(j, z));
        if slot > 0 {
            if let Some(p) = s.polys.get(j) {
                let t = C64::new((x - b * j as f64) / bm, 0.0);
                for part in [&p.re, &p.im] {
                    let sup = part.sup_bound_on_i0();
                    if sup > 0.0 {
                        checks += 1;
                        match growth_bound_check(&part.scaled(1.0 / sup), t, false) {
                            Ok(c) if c.holds => {}
                            _ => bad += 1,
                        }
                    }
                }
            }
        }
    }
    (parts, checks, bad)
}

/// Assembles `g` and measures `ε(m)`, `C₄`, the `∂̄` residual and the
/// `Σ`-split on `[bm, x_cert]`.
pub fn build_g(scheme: &CorrectionScheme, grid: &CertGrid, x_cert: f64) -> Result<Correction> {
    let inner = scheme.inner.clone();
    let bm = scheme.b * scheme.m as f64;
    if x_cert > scheme.x_max() + 1e-9 || x_cert <= bm {
        return Err(Error::InvalidParameter(format!(
            "x_cert = {x_cert} outside (bm, {}]",
            scheme.x_max()
        )));
    }
    let stops = real_stops(bm, x_cert, grid.resolution / 4.0);
    let rows: Vec<(f64, [C64; 3], usize, usize, f64)> = stops
        .par_iter()
        .map(|&x| {
            let (p, c, v) = split_at(&inner, x);
            (x, p, c, v, inner.g(C64::new(x, 0.0)).norm())
        })
        .collect();
    let mut epsilon = 0.0f64;
    let mut epsilon_at = bm;
    let mut sigma = SigmaSplit { sigma1: 0.0, sigma2: 0.0, sigma3: 0.0 };
    let (mut growth_checks, mut growth_violations) = (0, 0);
    for (x, p, c, v, g) in rows {
        if !(g <= epsilon) {
            epsilon = g;
            epsilon_at = x;
        }
        sigma.sigma1 = sigma.sigma1.max(p[0].norm());
        sigma.sigma2 = sigma.sigma2.max(p[1].norm());
        sigma.sigma3 = sigma.sigma3.max(p[2].norm());
        growth_checks += c;
        growth_violations += v;
    }
    let pts = grid.points();
    let gf = |z: C64| inner.g(z);
    let h0 = |z: C64| inner.h0.eval(z);
    let (c4, _) = grid_sup(&pts, |z| wirtinger(&gf, z, FD_STEP).0.norm());
    let (dbar_residual, _) = grid_sup(&pts, |z| (wirtinger(&gf, z, FD_STEP).1 - wirtinger(&h0, z, FD_STEP).1).norm());
    Ok(Correction {
        scheme: scheme.clone(),
        epsilon,
        epsilon_at,
        x_cert,
        c4,
        dbar_residual,
        sigma,
        growth_checks,
        growth_violations,
        grid: *grid,
    })
}

/// `h = H − g = Σ_k e_k (H(bk) + 𝒫_k((z − bk)/(bm)))`, evaluated in the
/// closed form, which is analytic term by term.
#[derive(Clone)]
pub struct AnalyticH {
    scheme: CorrectionScheme,
    /// Sampled `sup |∂̄h|` and where it occurs.
    pub dbar_residual: f64,
    pub dbar_worst: C64,
    /// `sup |h − (H − g)|` on the grid.
    pub consistency: f64,
    /// Sampled `sup |∂h|`.
    pub c_h: f64,
    /// `sup |f(x) − h(x)|` over `[bm, x_cert]`.
    pub approx_error: f64,
    pub delta: f64,
    pub x_cert: f64,
}

impl std::fmt::Debug for AnalyticH {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnalyticH")
            .field("dbar_residual", &self.dbar_residual)
            .field("dbar_worst", &self.dbar_worst)
            .field("consistency", &self.consistency)
            .field("c_h", &self.c_h)
            .field("approx_error", &self.approx_error)
            .finish()
    }
}

impl AnalyticH {
    pub fn scheme(&self) -> &CorrectionScheme {
        &self.scheme
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.scheme.inner.h(z)
    }

    pub fn field(&self) -> Field {
        let inner = self.scheme.inner.clone();
        Arc::new(move |z| inner.h(z))
    }

    /// The rescaled source `H`, equal to `f` on the real axis.
    pub fn source(&self, z: C64) -> C64 {
        self.scheme.h0().source(z)
    }
}

/// Forms `h`, checks analyticity to `tol` on the grid and measures the
/// approximation error against `f` (the source `H` on the real axis).
pub fn build_h(g: &Correction, tol: f64) -> Result<AnalyticH> {
    let inner = g.scheme.inner.clone();
    let pts = g.grid.points();
    let hf = |z: C64| inner.h(z);
    let (dbar_residual, dbar_worst) = grid_sup(&pts, |z| wirtinger(&hf, z, FD_STEP).1.norm());
    if !(dbar_residual <= tol) {
        return Err(Error::DbarCorrectionFailed { residual: dbar_residual, re: dbar_worst.re, im: dbar_worst.im });
    }
    let (consistency, _) = grid_sup(&pts, |z| (inner.h(z) - (inner.h0.source(z) - inner.g(z))).norm());
    let (c_h, _) = grid_sup(&pts, |z| wirtinger(&hf, z, FD_STEP).0.norm());
    let bm = g.scheme.b * g.scheme.m as f64;
    let approx_error = real_stops(bm, g.x_cert, g.grid.resolution / 4.0)
        .par_iter()
        .map(|&x| {
            let z = C64::new(x, 0.0);
            (inner.h0.source(z) - inner.h(z)).norm()
        })
        .reduce(|| 0.0, f64::max);
    Ok(AnalyticH {
        scheme: g.scheme.clone(),
        dbar_residual,
        dbar_worst,
        consistency,
        c_h,
        approx_error,
        delta: bm,
        x_cert: g.x_cert,
    })
}
