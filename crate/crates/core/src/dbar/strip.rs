use std::f64::consts::LN_2;
use std::sync::Arc;

use super::{grid_sup, BlochFunction, CertGrid, Field, FD_STEP};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, gradient_norm};
use crate::C64;

/// A Lipschitz function on a half-strip with its sampled gradient bound.
#[derive(Clone)]
pub struct StripLipschitz {
    eval: Field,
    alpha: f64,
    c_lip: f64,
    worst: C64,
    analytic_from: f64,
}

impl std::fmt::Debug for StripLipschitz {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StripLipschitz")
            .field("alpha", &self.alpha)
            .field("c_lip", &self.c_lip)
            .field("analytic_from", &self.analytic_from)
            .finish()
    }
}

impl StripLipschitz {
    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn field(&self) -> Field {
        self.eval.clone()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Sampled sup of `|∂f| + |∂̄f|`.
    pub fn c_lip(&self) -> f64 {
        self.c_lip
    }

    /// Grid point where the gradient bound is attained.
    pub fn worst_point(&self) -> C64 {
        self.worst
    }

    /// The function is analytic (and equal to the transported input) for
    /// `x ≥ analytic_from`.
    pub fn analytic_from(&self) -> f64 {
        self.analytic_from
    }
}

pub(crate) fn sampled_gradient(f: &Field, grid: &CertGrid) -> (f64, C64) {
    grid_sup(&grid.points(), |z| gradient_norm(&**f, z, FD_STEP))
}

/// `f(z) = F(e^{−z})` on `Π_α^{log 2}`; the gradient is sampled on
/// `log 2 < x < log 2 + depth`.
pub fn transport_to_strip(bloch: &BlochFunction, depth: f64, resolution: f64) -> StripLipschitz {
    let b = bloch.clone();
    let eval: Field = Arc::new(move |z: C64| b.eval((-z).exp()));
    let grid = CertGrid::new(LN_2, LN_2 + depth, bloch.alpha() / 2.0, resolution);
    let d = bloch.clone();
    let (c_lip, worst) = grid_sup(&grid.points(), |z| {
        let w = (-z).exp();
        (d.derivative(w) * w).norm()
    });
    StripLipschitz { eval, alpha: bloch.alpha(), c_lip, worst, analytic_from: LN_2 }
}

/// Half-width of the mollifier support.
const MOLLIFIER_RADIUS: f64 = 0.125;
/// Band `|x − log 2| ≤ BLEND_INNER` is fully smoothed; the blend vanishes
/// beyond `BLEND_OUTER`.
const BLEND_INNER: f64 = 0.125;
const BLEND_OUTER: f64 = 0.25;

/// `x ↦ |x|`, then reflection of `(0, log 2)` across `log 2`.
fn reflect(x: f64) -> f64 {
    let a = x.abs();
    if a < LN_2 {
        2.0 * LN_2 - a
    } else {
        a
    }
}

/// Quadratic B-spline on `[−1/8, 1/8]`, unit mass.
fn mollifier(s: f64) -> f64 {
    let u = (s + MOLLIFIER_RADIUS) * 12.0;
    let b = if !(0.0..=3.0).contains(&u) {
        0.0
    } else if u < 1.0 {
        u * u / 2.0
    } else if u < 2.0 {
        (-2.0 * u * u + 6.0 * u - 3.0) / 2.0
    } else {
        (3.0 - u) * (3.0 - u) / 2.0
    };
    12.0 * b
}

/// C¹ blend: 1 on the inner band, 0 outside the outer band.
fn blend(x: f64) -> f64 {
    let d = (x - LN_2).abs();
    if d <= BLEND_INNER {
        1.0
    } else if d >= BLEND_OUTER {
        0.0
    } else {
        let t = (BLEND_OUTER - d) / (BLEND_OUTER - BLEND_INNER);
        t * t * (3.0 - 2.0 * t)
    }
}

struct Smoother {
    f: Field,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Smoother {
    fn fstar(&self, z: C64) -> C64 {
        (self.f)(C64::new(reflect(z.re), z.im))
    }

    /// `∫ ρ(s) f*(z − s) ds`, split at the spline knots and the kinks of
    /// `f*` so each piece is smooth.
    fn convolve(&self, z: C64) -> C64 {
        let r = MOLLIFIER_RADIUS;
        let mut cuts = vec![-r, -r / 3.0, r / 3.0, r];
        for kink in [-LN_2, 0.0, LN_2] {
            let s = z.re - kink;
            if s > -r && s < r {
                cuts.push(s);
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut acc = C64::new(0.0, 0.0);
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 0.0 {
                continue;
            }
            let half = (b - a) / 2.0;
            let mid = (a + b) / 2.0;
            for (&t, &wt) in self.nodes.iter().zip(&self.weights) {
                let s = mid + half * t;
                acc += self.fstar(z - s) * (wt * half * mollifier(s));
            }
        }
        acc
    }

    fn eval(&self, z: C64) -> C64 {
        let base = self.fstar(z);
        let chi = blend(z.re);
        if chi == 0.0 {
            return base;
        }
        base + (self.convolve(z) - base) * chi
    }
}

/// Reflects `f` across `x = log 2` (and evenly across `x = 0`), then
/// mollifies in `x` near the reflection line. The result equals `f` for
/// `x ≥ log 2 + 1/4`, in particular on `x ≥ 1`.
pub fn extend_reflect_smooth(f: &StripLipschitz, grid: &CertGrid) -> Result<StripLipschitz> {
    if (f.analytic_from - LN_2).abs() > 1e-12 {
        return Err(Error::InvalidParameter("expected a function transported to Π^{log 2}".into()));
    }
    let (nodes, weights) = gauss_legendre::<f64>(16);
    let sm = Arc::new(Smoother { f: f.field(), nodes, weights });
    let eval: Field = Arc::new(move |z: C64| sm.eval(z));
    let (c_lip, worst) = sampled_gradient(&eval, grid);
    Ok(StripLipschitz { eval, alpha: f.alpha, c_lip, worst, analytic_from: LN_2 + BLEND_OUTER })
}

/// `H(x + iy) = f(x + i(α/β)y)` on `Π_β`.
#[derive(Clone)]
pub struct Rescaled {
    eval: Field,
    pub alpha: f64,
    pub beta: f64,
    /// Sampled sup of `|∇H|`.
    pub c3: f64,
    pub worst: C64,
}

impl Rescaled {
    pub fn eval(&self, z: C64) -> C64 {
        (self.eval)(z)
    }

    pub fn field(&self) -> Field {
        self.eval.clone()
    }
}

pub fn vertical_rescale(fstar: &StripLipschitz, alpha: f64, beta: f64, grid: &CertGrid) -> Result<Rescaled> {
    if !(alpha > 0.0 && alpha < beta && beta < std::f64::consts::PI) {
        return Err(Error::InvalidParameter("need 0 < alpha < beta < π".into()));
    }
    let f = fstar.field();
    let k = alpha / beta;
    let eval: Field = Arc::new(move |z: C64| f(C64::new(z.re, k * z.im)));
    let (c3, worst) = sampled_gradient(&eval, grid);
    Ok(Rescaled { eval, alpha, beta, c3, worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::wirtinger;
    use std::f64::consts::PI;

    fn identity_strip() -> StripLipschitz {
        StripLipschitz { eval: Arc::new(|z| z), alpha: 1.0, c_lip: 1.0, worst: C64::new(1.0, 0.0), analytic_from: LN_2 }
    }

    #[test]
    fn mollifier_has_unit_mass_and_blend_is_c1() {
        let (n, w) = gauss_legendre::<f64>(16);
        let mut mass = 0.0;
        for (a, b) in [(-0.125, -0.125 / 3.0), (-0.125 / 3.0, 0.125 / 3.0), (0.125 / 3.0, 0.125)] {
            for (&t, &wt) in n.iter().zip(&w) {
                mass += wt * (b - a) / 2.0 * mollifier((a + b) / 2.0 + (b - a) / 2.0 * t);
            }
        }
        assert!((mass - 1.0).abs() < 1e-14);
        let e = 1e-7;
        for x in [LN_2 + 0.125, LN_2 + 0.25, LN_2 - 0.125] {
            let left = (blend(x) - blend(x - e)) / e;
            let right = (blend(x + e) - blend(x)) / e;
            // one-sided quotients differ by O(e · sup|blend″|) = O(4e-5)
            assert!((left - right).abs() < 1e-3);
        }
    }

    #[test]
    fn reflection_value_at_origin() {
        let f = identity_strip();
        let sm = Smoother { f: f.field(), nodes: vec![], weights: vec![] };
        assert!((sm.fstar(C64::new(0.0, 0.0)) - 2.0 * LN_2).norm() < 1e-15);
        assert!((sm.fstar(C64::new(0.2, 0.3)) - C64::new(2.0 * LN_2 - 0.2, 0.3)).norm() < 1e-15);
    }

    #[test]
    fn extension_preserves_input_beyond_band() {
        let bloch = BlochFunction::spiral(PI / 3.0, PI / 2.0, 0.25).unwrap();
        let f = transport_to_strip(&bloch, 10.0, 0.2);
        let grid = CertGrid::new(0.0, 6.0, PI / 6.0, 0.1);
        let fs = extend_reflect_smooth(&f, &grid).unwrap();
        for x in [1.0, 1.5, 4.0] {
            for y in [-0.5, 0.0, 0.3] {
                let z = C64::new(x, y);
                assert_eq!(fs.eval(z), f.eval(z));
            }
        }
        assert!(fs.analytic_from() <= 1.0);
        // reflection doubles at most the gradient, smoothing adds little
        assert!(fs.c_lip() <= 2.0 * f.c_lip() * 1.05, "{} vs {}", fs.c_lip(), f.c_lip());
    }

    #[test]
    fn smoothing_removes_the_kink() {
        let f = identity_strip();
        let grid = CertGrid::new(0.0, 2.0, 0.5, 0.1);
        let fs = extend_reflect_smooth(&f, &grid).unwrap();
        // ∂_x f_s is continuous across log 2
        let dx = |x: f64| {
            let e = 1e-6;
            ((fs.eval(C64::new(x + e, 0.0)) - fs.eval(C64::new(x - e, 0.0))) / (2.0 * e)).re
        };
        assert!((dx(LN_2 + 1e-4) - dx(LN_2 - 1e-4)).abs() < 1e-2);
        assert!(fs.c_lip() <= 1.0 + 0.05);
    }

    #[test]
    fn rescale_identities() {
        let f = identity_strip();
        let (alpha, beta) = (PI / 3.0, PI / 2.0);
        let grid = CertGrid::new(1.0, 3.0, beta / 2.0, 0.25);
        let h = vertical_rescale(&f, alpha, beta, &grid).unwrap();
        assert_eq!(h.eval(C64::new(2.0, 0.0)), C64::new(2.0, 0.0));
        assert!((h.eval(C64::new(2.0, beta / 2.0)).im - alpha / 2.0).abs() < 1e-15);
        let (_, db) = wirtinger(&|z| h.eval(z), C64::new(2.0, 0.1), 1e-4);
        assert!((db - C64::new((1.0 - alpha / beta) / 2.0, 0.0)).norm() < 1e-10);
        assert!(vertical_rescale(&f, beta, alpha, &grid).is_err());
    }
}
