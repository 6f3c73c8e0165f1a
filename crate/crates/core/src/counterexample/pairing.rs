use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::series::{cauchy_distance, lambda, zeta, OscillatingGaussianSeries, SupEstimate};
use crate::error::{Error, Result};
use crate::numerics::integrate_bumps;
use crate::C64;

pub const PAIRING_TOL: f64 = 1e-12;

/// Members of the finite `H^∞(Ω)` test family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestKind {
    One,
    /// `e^{isξ}`, with norm `e^{sπ/2}` on `Ω`.
    Exp { s: f64 },
    /// `f` itself, normed by its sampled sup.
    Series,
    /// `M_a(e^ξ − 1)` with `M_a(w) = (w − a)/(1 − ā w)`: a disk automorphism
    /// pulled back through the shift of `D₁` and `log`.
    Mobius { a: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub kind: TestKind,
    pub norm: f64,
}

impl TestFunction {
    pub fn eval(&self, s: &OscillatingGaussianSeries, xi: C64) -> C64 {
        match self.kind {
            TestKind::One => C64::new(1.0, 0.0),
            TestKind::Exp { s } => (C64::new(0.0, s) * xi).exp(),
            TestKind::Series => s.eval(xi),
            TestKind::Mobius { a } => {
                let a = C64::new(a[0], a[1]);
                let w = xi.exp() - 1.0;
                (w - a) / (1.0 - a.conj() * w)
            }
        }
    }

    pub fn label(&self) -> String {
        match self.kind {
            TestKind::One => "1".into(),
            TestKind::Exp { s } => format!("exp(i{s}ξ)"),
            TestKind::Series => "f".into(),
            TestKind::Mobius { a } => format!("mobius({}, {})", a[0], a[1]),
        }
    }
}

/// `{1, e^{iξ/4}, e^{iξ}, e^{4iξ}, f, three Möbius pullbacks}`.
pub fn test_family(sup: &SupEstimate) -> Vec<TestFunction> {
    let mut out = vec![TestFunction { kind: TestKind::One, norm: 1.0 }];
    for s in [0.25, 1.0, 4.0] {
        out.push(TestFunction { kind: TestKind::Exp { s }, norm: (s * FRAC_PI_2).exp() });
    }
    out.push(TestFunction { kind: TestKind::Series, norm: sup.sup.max(sup.sup_fine) });
    for a in [[0.5, 0.0], [-0.9, 0.0], [0.0, 0.6]] {
        out.push(TestFunction { kind: TestKind::Mobius { a }, norm: 1.0 });
    }
    out
}

/// `ζ_j = −2^j` for `j ∈ [lo, hi]`.
pub fn dyadic_endpoints(lo: u32, hi: u32) -> Vec<f64> {
    (lo..=hi).map(|j| -(2.0f64).powi(j as i32)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub h: TestFunction,
    pub zeta_endpoints: Vec<f64>,
    /// `|∫_ζ^0 f h|` per endpoint.
    pub values: Vec<f64>,
    pub h_norm: f64,
    /// `max value/h_norm`.
    pub bound_constant: f64,
}

fn check_endpoints(zeta_list: &[f64]) -> Result<()> {
    if zeta_list.is_empty() || zeta_list.iter().any(|z| !(*z < 0.0 && z.is_finite())) {
        return Err(Error::InvalidParameter("pairing endpoints must be real and negative".into()));
    }
    Ok(())
}

/// `∫_ζ^0 f h` on the real axis.
pub fn pairing_integral(s: &OscillatingGaussianSeries, h: &TestFunction, zeta0: f64) -> Result<C64> {
    let g = |x: f64| {
        let xi = C64::new(x, 0.0);
        s.eval(xi) * h.eval(s, xi)
    };
    Ok(integrate_bumps(&g, &s.centers(), s.window, zeta0, 0.0, PAIRING_TOL)?.value)
}

pub fn pairing_bound(s: &OscillatingGaussianSeries, h: &TestFunction, zeta_list: &[f64]) -> Result<PairingReport> {
    check_endpoints(zeta_list)?;
    let values: Vec<f64> =
        zeta_list.par_iter().map(|&z| pairing_integral(s, h, z).map(|v| v.norm())).collect::<Result<_>>()?;
    let bound_constant = values.iter().fold(0.0f64, |m, v| m.max(v / h.norm));
    Ok(PairingReport { h: *h, zeta_endpoints: zeta_list.to_vec(), values, h_norm: h.norm, bound_constant })
}

/// Per-mode integration by parts: `λ_k |∫_ζ^0 e^{iλ_k(ξ−ζ_k)} e^{−(ξ−ζ_k)²} h| / ‖h‖`
/// against the constant `C = 4 + √π/δ`, where `δ` is the Cauchy radius on
/// the negative axis. The boundary term contributes 2, `∫ 2|d| e^{−d²}` another
/// 2 and `∫ |h′| e^{−d²} ≤ √π ‖h‖/δ` the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub k: Vec<usize>,
    pub lambda: Vec<f64>,
    /// Max over the family and the endpoints, per mode.
    pub scaled: Vec<f64>,
    pub global_c: f64,
    pub ibp_constant: f64,
    pub cauchy_distance: f64,
}

impl ModeReport {
    pub fn holds(&self) -> bool {
        self.global_c <= self.ibp_constant
    }
}

pub fn mode_integral(s: &OscillatingGaussianSeries, k: usize, h: &TestFunction, zeta0: f64) -> Result<C64> {
    let g = |x: f64| {
        let xi = C64::new(x, 0.0);
        s.mode(k, xi) * h.eval(s, xi)
    };
    Ok(integrate_bumps(&g, &[zeta(k)], s.window, zeta0, 0.0, PAIRING_TOL)?.value)
}

pub fn mode_check(s: &OscillatingGaussianSeries, family: &[TestFunction], zeta_list: &[f64]) -> Result<ModeReport> {
    check_endpoints(zeta_list)?;
    let ks: Vec<usize> = s.indices().collect();
    let scaled: Vec<f64> = ks
        .par_iter()
        .map(|&k| {
            let mut worst = 0.0f64;
            for h in family {
                for &z in zeta_list {
                    worst = worst.max(lambda(k) * mode_integral(s, k, h, z)?.norm() / h.norm);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let delta = cauchy_distance();
    Ok(ModeReport {
        lambda: ks.iter().map(|&k| lambda(k)).collect(),
        global_c: scaled.iter().cloned().fold(0.0, f64::max),
        k: ks,
        scaled,
        ibp_constant: 4.0 + PI.sqrt() / delta,
        cauchy_distance: delta,
    })
}

#[cfg(test)]
mod tests {
    use super::super::series::{a, sup_f};
    use super::*;

    fn setup() -> (OscillatingGaussianSeries, Vec<TestFunction>) {
        let s = OscillatingGaussianSeries::default();
        let sup = sup_f(&s, 0.1).unwrap();
        (s, test_family(&sup))
    }

    #[test]
    fn family_norms_dominate_samples() {
        let (s, fam) = setup();
        for h in &fam {
            for i in 0..40 {
                for j in 0..31 {
                    let xi = C64::new(-10.0 + 0.25 * i as f64, -1.5 + 0.1 * j as f64);
                    if super::super::series::in_omega(xi) {
                        assert!(h.eval(&s, xi).norm() <= h.norm * (1.0 + 1e-12), "{}", h.label());
                    }
                }
            }
        }
    }

    #[test]
    fn constant_pairing_is_bounded() {
        let (s, fam) = setup();
        let r = pairing_bound(&s, &fam[0], &dyadic_endpoints(3, 20)).unwrap();
        // ∫_ζ^0 f with bumps entirely inside: Σ a_k ∫ e^{iλ d − d²} = Σ a_k √π e^{−λ²/4}
        let full: f64 = (2..=19).map(|k| a(k) * PI.sqrt() * (-lambda(k).powi(2) / 4.0).exp()).sum();
        assert!(r.bound_constant < full + a(20) * PI.sqrt());
        assert!(r.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn mode_ratios_below_ibp_constant() {
        let (s, fam) = setup();
        let rep = mode_check(&s, &fam, &dyadic_endpoints(3, 20)).unwrap();
        assert!(rep.holds(), "{} > {}", rep.global_c, rep.ibp_constant);
    }

    #[test]
    fn rejects_nonnegative_endpoints() {
        let (s, fam) = setup();
        assert!(pairing_bound(&s, &fam[0], &[0.0]).is_err());
        assert!(pairing_bound(&s, &fam[0], &[]).is_err());
    }
}
