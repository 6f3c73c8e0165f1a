use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_bumps, integrate_segment, Segment, DEFAULT_TAIL_WINDOW};
use crate::C64;

/// First index with `λ_k > 0`.
pub const FIRST_INDEX: usize = 2;
pub const DEFAULT_K_MAX: usize = 20;

/// `ξ ∈ Ω ⇔ x < log(2 cos y)` with `|y| < π/2`.
pub fn in_omega(xi: C64) -> bool {
    xi.im.abs() < FRAC_PI_2 && xi.re < (2.0 * xi.im.cos()).ln()
}

/// `f(ξ) = Σ_{k=2}^{K_max} a_k e^{iλ_k(ξ−ζ_k)} e^{−(ξ−ζ_k)²}` with
/// `λ_k = ½(log k + log log k)`, `a_k = e^{−2λ_k} = 1/(k log k)` and
/// `ζ_k = −2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OscillatingGaussianSeries {
    #[serde(rename = "K_max", alias = "k_max", default = "default_k_max")]
    pub k_max: usize,
    /// Half-width of the per-bump integration window.
    #[serde(default = "default_window")]
    pub window: f64,
}

fn default_k_max() -> usize {
    DEFAULT_K_MAX
}

fn default_window() -> f64 {
    DEFAULT_TAIL_WINDOW
}

impl Default for OscillatingGaussianSeries {
    fn default() -> Self {
        Self { k_max: DEFAULT_K_MAX, window: DEFAULT_TAIL_WINDOW }
    }
}

impl OscillatingGaussianSeries {
    pub fn new(k_max: usize, window: f64) -> Result<Self> {
        let s = Self { k_max, window };
        s.validate()?;
        Ok(s)
    }

    /// `ζ_k` stays a representable, well separated real for `k ≤ 60`.
    pub fn validate(&self) -> Result<()> {
        if !(FIRST_INDEX + 1..=60).contains(&self.k_max) {
            return Err(Error::InvalidParameter("K_max must lie in 3..=60".into()));
        }
        if !(self.window >= 3.0 && self.window.is_finite()) {
            return Err(Error::InvalidParameter("window must be at least 3".into()));
        }
        if !(lambda(FIRST_INDEX) > 0.0) {
            return Err(Error::InvalidParameter("λ_k must be positive from the first index".into()));
        }
        Ok(())
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        FIRST_INDEX..=self.k_max
    }

    pub fn centers(&self) -> Vec<f64> {
        self.indices().map(zeta).collect()
    }

    fn term(k: usize, xi: C64) -> C64 {
        let d = xi - zeta(k);
        a(k) * (C64::new(0.0, lambda(k)) * d - d * d).exp()
    }

    /// Truncated series; terms more than 40 from `Re ξ` are exactly zero in
    /// `f64` and skipped.
    pub fn eval(&self, xi: C64) -> C64 {
        self.indices()
            .filter(|&k| (xi.re - zeta(k)).abs() < 40.0)
            .map(|k| Self::term(k, xi))
            .sum()
    }

    /// Single mode `e^{iλ_k(ξ−ζ_k)} e^{−(ξ−ζ_k)²}` (no `a_k`).
    pub fn mode(&self, k: usize, xi: C64) -> C64 {
        Self::term(k, xi) / a(k)
    }

    /// Bound on the dropped terms `k > K_max` at `ξ`, using
    /// `|a_k e^{iλ_k(ξ−ζ_k)} e^{−(ξ−ζ_k)²}| = a_k e^{−λ_k y} e^{−(x−ζ_k)² + y²}`.
    pub fn truncation_bound(&self, xi: C64) -> f64 {
        (self.k_max + 1..=self.k_max + 8)
            .map(|k| {
                let dx = xi.re - zeta(k);
                a(k) * (-lambda(k) * xi.im - dx * dx + xi.im * xi.im).exp()
            })
            .sum()
    }

    /// `∫_lo^hi |f|` over `[lo, hi] ⊂ (−∞, 0]` with windows at every center.
    pub fn abs_integral(&self, lo: f64, hi: f64, tol: f64) -> Result<f64> {
        let f = |x: f64| C64::new(self.eval(C64::new(x, 0.0)).norm(), 0.0);
        Ok(integrate_bumps(&f, &self.centers(), self.window, lo, hi, tol)?.value.re)
    }
}

pub fn lambda(k: usize) -> f64 {
    let l = (k as f64).ln();
    0.5 * (l + l.ln())
}

pub fn a(k: usize) -> f64 {
    (-2.0 * lambda(k)).exp()
}

pub fn zeta(k: usize) -> f64 {
    -(2.0f64).powi(k as i32)
}

/// Partial sums and the identities behind divergence of `Σ a_k` and
/// convergence of `Σ a_k/λ_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConditions {
    pub k: usize,
    /// `Σ_{k≤K} a_k`.
    pub sum_a: f64,
    pub log_log_k: f64,
    /// `sum_a / log log K`.
    pub ratio: f64,
    /// `Σ_{k≤K} a_k/λ_k`.
    pub sum_a_over_lambda: f64,
    /// Integral-test bound `2/log K` on `Σ_{k>K} a_k/λ_k`.
    pub tail_bound: f64,
    /// `max_k |a_k e^{2λ_k} − 1|`.
    pub product_defect: f64,
}

/// Pure sequence checks; `K` is not limited by `K_max`.
pub fn check_series_conditions(k: usize) -> Result<SeriesConditions> {
    if k < FIRST_INDEX + 1 {
        return Err(Error::InvalidParameter("K must be at least 3".into()));
    }
    let (mut sum_a, mut sum_al, mut defect) = (0.0, 0.0, 0.0f64);
    for j in FIRST_INDEX..=k {
        let (aj, lj) = (a(j), lambda(j));
        sum_a += aj;
        sum_al += aj / lj;
        defect = defect.max((aj * (2.0 * lj).exp() - 1.0).abs());
    }
    let log_log_k = (k as f64).ln().ln();
    Ok(SeriesConditions {
        k,
        sum_a,
        log_log_k,
        ratio: sum_a / log_log_k,
        sum_a_over_lambda: sum_al,
        tail_bound: 2.0 / (k as f64).ln(),
        product_defect: defect,
    })
}

/// `V(K) = ∫_{ζ_K}^0 |f|` for `K = k_lo..=k_hi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialVariation {
    pub k: Vec<usize>,
    pub v: Vec<f64>,
    /// `Σ_{k≤K} a_k` at each `K`.
    pub sum_a: Vec<f64>,
    /// `(2/e²) Σ_{k≤K} a_k` minus the tail slack.
    pub lower_bound: Vec<f64>,
    pub increasing: bool,
    /// Least-squares `V ≈ α + β Σ a_k`.
    pub fit_intercept: f64,
    pub fit_slope: f64,
    pub fit_rms: f64,
}

pub const VARIATION_TOL: f64 = 1e-12;

/// Bump-localized `V(K)` for each `K ∈ [k_lo, k_hi]`.
pub fn radial_variation_f(s: &OscillatingGaussianSeries, k_lo: usize, k_hi: usize) -> Result<RadialVariation> {
    if !(FIRST_INDEX <= k_lo && k_lo <= k_hi && k_hi <= s.k_max) {
        return Err(Error::InvalidParameter("need 2 ≤ k_lo ≤ k_hi ≤ K_max".into()));
    }
    let ks: Vec<usize> = (k_lo..=k_hi).collect();
    let v: Vec<f64> =
        ks.par_iter().map(|&k| s.abs_integral(zeta(k), 0.0, VARIATION_TOL)).collect::<Result<_>>()?;
    let sum_a: Vec<f64> = ks.iter().map(|&k| (FIRST_INDEX..=k).map(a).sum()).collect();
    let e2 = (2.0f64).exp().recip();
    let lower_bound: Vec<f64> = sum_a.iter().map(|&sa| 2.0 * e2 * sa - 1e-9).collect();
    let n = ks.len() as f64;
    let (mx, my) = (sum_a.iter().sum::<f64>() / n, v.iter().sum::<f64>() / n);
    let sxx: f64 = sum_a.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = sum_a.iter().zip(&v).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rms = (sum_a.iter().zip(&v).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum::<f64>() / n).sqrt();
    Ok(RadialVariation {
        increasing: v.windows(2).all(|w| w[1] > w[0]),
        k: ks,
        v,
        sum_a,
        lower_bound,
        fit_intercept: intercept,
        fit_slope: slope,
        fit_rms: rms,
    })
}

/// `∫_{ζ_k−W}^{ζ_k+W}` of the single term `|a_k e^{iλ_k(ξ−ζ_k)} e^{−(ξ−ζ_k)²}|`.
pub fn bump_variation(s: &OscillatingGaussianSeries, k: usize) -> Result<f64> {
    let c = zeta(k);
    let f = |x: f64| C64::new((a(k) * s.mode(k, C64::new(x, 0.0))).norm(), 0.0);
    Ok(integrate_bumps(&f, &[c], s.window, c - s.window, c + s.window, VARIATION_TOL)?.value.re)
}

/// Sampled `sup_Ω |f|` on a grid of step `h` restricted to the bump windows
/// and `[−W, log 2]`, where `f` is not exponentially small. Each column runs
/// over the closed section `|y| ≤ arccos(e^x/2)` because the sup sits on the
/// boundary curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupEstimate {
    pub sup: f64,
    pub at: [f64; 2],
    pub sup_fine: f64,
    pub samples: usize,
}

fn sup_on_grid(s: &OscillatingGaussianSeries, h: f64) -> (f64, [f64; 2], usize) {
    let mut xs: Vec<(f64, f64)> = s.centers().iter().map(|&c| (c - s.window, c + s.window)).collect();
    xs.push((-s.window, 2f64.ln()));
    xs.par_iter()
        .map(|&(lo, hi)| {
            let nx = ((hi - lo) / h).ceil() as usize;
            let mut best = (0.0, [0.0, 0.0], 0usize);
            for i in 0..=nx {
                let x = lo + (hi - lo) * i as f64 / nx as f64;
                let y_max = (0.5 * x.exp()).min(1.0).acos();
                let ny = ((2.0 * y_max / h).ceil() as usize).max(1);
                for j in 0..=ny {
                    let y = -y_max + 2.0 * y_max * j as f64 / ny as f64;
                    best.2 += 1;
                    let v = s.eval(C64::new(x, y)).norm();
                    if v > best.0 {
                        best.0 = v;
                        best.1 = [x, y];
                    }
                }
            }
            best
        })
        .reduce(|| (0.0, [0.0, 0.0], 0), |p, q| {
            let n = p.2 + q.2;
            if q.0 > p.0 {
                (q.0, q.1, n)
            } else {
                (p.0, p.1, n)
            }
        })
}

pub fn sup_f(s: &OscillatingGaussianSeries, h: f64) -> Result<SupEstimate> {
    if !(h > 0.0 && h <= 0.5) {
        return Err(Error::InvalidParameter("grid step must lie in (0, 1/2]".into()));
    }
    let (sup, at, samples) = sup_on_grid(s, h);
    let (sup_fine, _, fine) = sup_on_grid(s, h / 2.0);
    Ok(SupEstimate { sup, at, sup_fine, samples: samples + fine })
}

/// `dist((−∞, 0], ∂Ω)`, the radius available to the Cauchy estimate
/// `|h′| ≤ ‖h‖/δ` on the negative axis.
pub fn cauchy_distance() -> f64 {
    let n = 20_000;
    let boundary: Vec<(f64, f64)> = (1..n)
        .map(|j| {
            let y = FRAC_PI_2 * j as f64 / n as f64;
            ((2.0 * y.cos()).ln(), y)
        })
        .collect();
    // the nearest boundary point to t ≤ 0 has |y| < π/2, so t ∈ [−8, 0] covers it
    (0..=800)
        .map(|i| -8.0 * i as f64 / 800.0)
        .map(|t| boundary.iter().map(|&(x, y)| ((x - t).powi(2) + y * y).sqrt()).fold(f64::INFINITY, f64::min))
        .fold(f64::INFINITY, f64::min)
}

/// `∫_a^b f` along a straight segment in `Ω`.
pub(crate) fn integrate_f_segment<H>(s: &OscillatingGaussianSeries, h: &H, a: C64, b: C64, tol: f64) -> Result<C64>
where
    H: Fn(C64) -> C64 + ?Sized,
{
    Ok(integrate_segment(&|xi: C64| s.eval(xi) * h(xi), &Segment::line(a, b), tol)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use proptest::prelude::*;

    #[test]
    fn sequence_values() {
        // a_10 = 1/(10 ln 10)
        assert!((a(10) - 0.043_429_448_190_325_18).abs() < 1e-15);
        assert!(lambda(2) > 0.0 && lambda(2) < lambda(3));
        assert_eq!(zeta(5), -32.0);
    }

    #[test]
    fn dominant_term_at_centers() {
        let s = OscillatingGaussianSeries::default();
        for k in 4..=20 {
            let v = s.eval(C64::new(zeta(k), 0.0));
            assert!((v - a(k)).norm() < 1e-12, "k = {k}");
        }
        // at k = 3 the left neighbour sits only 4 away: two-term tail bound
        let tail = a(2) * (-16.0f64).exp() + a(4) * (-64.0f64).exp();
        let v = s.eval(C64::new(zeta(3), 0.0));
        assert!((v - a(3)).norm() <= tail + 1e-15);
        assert!((v - a(3)).norm() > 1e-8);
    }

    #[test]
    fn bump_lower_bound_on_unit_interval() {
        let s = OscillatingGaussianSeries::default();
        for k in 3..=20 {
            for i in 0..=20 {
                let x = zeta(k) - 1.0 + i as f64 / 10.0;
                assert!(s.eval(C64::new(x, 0.0)).norm() >= a(k) / std::f64::consts::E.powi(2) - 1e-15);
            }
        }
    }

    #[test]
    fn per_bump_variation_in_envelope() {
        let s = OscillatingGaussianSeries::default();
        for k in 3..=20 {
            let v = bump_variation(&s, k).unwrap();
            let lo = 2.0 * a(k) / std::f64::consts::E.powi(2);
            let hi = a(k) * PI.sqrt();
            assert!(v >= lo && v <= hi * (1.0 + 1e-9), "k = {k}: {v}");
            // a single term on the real axis has modulus a_k e^{−d²}
            assert!((v - hi).abs() < 1e-10 * hi + 1e-14);
            // from k = 5 on the neighbours are at least 10 outside the window
            if k >= 5 {
                let full = s.abs_integral(zeta(k) - 6.0, zeta(k) + 6.0, 1e-13).unwrap();
                assert!((full - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bumps_are_disjoint() {
        for k in 3..20 {
            let gap = zeta(k) - zeta(k + 1);
            assert!(gap >= 8.0);
            // cross term between neighbours at either center
            assert!((-gap * gap).exp() <= (-36.0f64).exp());
        }
    }

    #[test]
    fn series_condition_sums() {
        // Σ_{k=2}^{K} 1/(k ln k), mpmath fsum at 30 digits
        let frozen = [(100, 2.322_941_804_991_371_8), (1000, 2.727_395_747_972_476_8), (10000, 3.015_010_880_401_468)];
        let mut last = f64::INFINITY;
        for (k, sum) in frozen {
            let c = check_series_conditions(k).unwrap();
            assert!((c.sum_a - sum).abs() < 1e-12, "K = {k}: {}", c.sum_a);
            assert!(c.ratio < last && c.ratio > 1.0);
            last = c.ratio;
            assert!(c.product_defect < 1e-14);
        }
        let c1 = check_series_conditions(100).unwrap();
        let c2 = check_series_conditions(10000).unwrap();
        assert!(c2.sum_a_over_lambda - c1.sum_a_over_lambda <= c1.tail_bound);
    }

    #[test]
    fn radial_variation_grows() {
        let s = OscillatingGaussianSeries::default();
        let rv = radial_variation_f(&s, 3, 20).unwrap();
        assert!(rv.increasing);
        for (v, lb) in rv.v.iter().zip(&rv.lower_bound) {
            assert!(v >= lb);
        }
        // between ζ_12 and ζ_4 the bumps are isolated: half of bump 4, bumps
        // 5..=11 and half of bump 12
        let model = PI.sqrt() * (a(4) / 2.0 + (5..12).map(a).sum::<f64>() + a(12) / 2.0);
        assert!((rv.v[12 - 3] - rv.v[4 - 3] - model).abs() < 1e-10);
    }

    #[test]
    fn sup_is_finite_and_stable() {
        let s = OscillatingGaussianSeries::default();
        let e = sup_f(&s, 0.1).unwrap();
        assert!(e.sup.is_finite() && e.sup > 0.0);
        assert!((e.sup_fine - e.sup).abs() <= 0.05 * e.sup);
        // envelope Σ a_k e^{λ_k π/2} e^{π²/4} from the first term
        assert!(e.sup <= 1.01 * a(2) * (lambda(2) * FRAC_PI_2 + PI * PI / 4.0).exp() + 0.1);
    }

    #[test]
    fn cauchy_distance_is_log_two() {
        let d = cauchy_distance();
        assert!((d - 2f64.ln()).abs() < 1e-3, "{d}");
    }

    #[test]
    fn truncation_bound_is_tiny_inside_the_range() {
        let s = OscillatingGaussianSeries::new(12, 6.0).unwrap();
        assert!(s.truncation_bound(C64::new(zeta(12), 1.0)) < 1e-300);
        assert!(s.truncation_bound(C64::new(zeta(13), 0.0)) > 0.0);
    }

    #[test]
    fn descriptor_rejects_unknown_keys() {
        let ok: OscillatingGaussianSeries = serde_json::from_str(r#"{"K_max": 12}"#).unwrap();
        assert_eq!(ok.k_max, 12);
        assert!(serde_json::from_str::<OscillatingGaussianSeries>(r#"{"K_max": 12, "zeta": 1}"#).is_err());
    }

    proptest! {
        #[test]
        fn product_identity_is_exact(k in 2usize..100_000) {
            prop_assert!((a(k) * (2.0 * lambda(k)).exp() - 1.0).abs() < 1e-13);
            prop_assert!((a(k) - 1.0 / (k as f64 * (k as f64).ln())).abs() < 1e-15);
        }

        #[test]
        fn sequences_are_monotone(k in 2usize..60) {
            prop_assert!(lambda(k + 1) > lambda(k));
            prop_assert!(zeta(k + 1) < zeta(k));
            prop_assert_eq!(zeta(k + 1) / zeta(k), 2.0);
        }
    }
}
