use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pairing::{pairing_integral, TestFunction};
use super::series::{integrate_f_segment, zeta, OscillatingGaussianSeries, FIRST_INDEX, VARIATION_TOL};
use crate::error::{Error, Result};
use crate::numerics::{integrate_segment, Segment};
use crate::C64;

/// `g(z) = ∫_1^z f(log w)/w dw` on `D₁ = {|w − 1| < 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskSymbol {
    pub series: OscillatingGaussianSeries,
}

pub fn disk_symbol(s: &OscillatingGaussianSeries) -> DiskSymbol {
    DiskSymbol { series: *s }
}

/// Absolute budget for the `r`-side variation.
pub const DISK_TOL: f64 = 1e-10;

/// Largest `K` with `e^{ζ_K − W}` a normal `f64`.
pub fn max_disk_index(s: &OscillatingGaussianSeries) -> usize {
    let floor = f64::MIN_POSITIVE.ln();
    s.indices().take_while(|&k| zeta(k) - s.window > floor).last().unwrap_or(FIRST_INDEX)
}

impl DiskSymbol {
    fn check(w: C64) -> Result<()> {
        if !((w - 1.0).norm() < 1.0) {
            return Err(Error::OutsideDomain { re: w.re, im: w.im });
        }
        Ok(())
    }

    pub fn gprime(&self, w: C64) -> Result<C64> {
        Self::check(w)?;
        Ok(self.gprime_unchecked(w))
    }

    /// `f(ξ) e^{−ξ}` with `ξ = log w`; dividing by a tiny complex `w`
    /// directly would underflow `|w|²`.
    pub fn gprime_unchecked(&self, w: C64) -> C64 {
        let xi = w.ln();
        self.series.eval(xi) * (-xi).exp()
    }

    /// `g′` moved to the unit disk, `w ↦ g′(w + 1)`.
    pub fn gprime_unit_disk(&self, w: C64) -> C64 {
        self.gprime_unchecked(w + 1.0)
    }

    /// `g(z) = ∫_0^{log z} f`, straight in the `ξ` plane when `Re log z ≥ 0`
    /// and along the two legs otherwise.
    pub fn g(&self, z: C64) -> Result<C64> {
        Self::check(z)?;
        let one = TestFunction { kind: super::pairing::TestKind::One, norm: 1.0 };
        Ok(-two_leg_pairing(&self.series, &one, z.ln())?.total)
    }

    /// `∫_{e^{ζ_K}}^1 |g′(r)| dr` computed in the `r` variable, window by
    /// window, to check against `V(K)`.
    pub fn radial_variation(&self, k: usize) -> Result<f64> {
        let s = &self.series;
        if !(FIRST_INDEX..=max_disk_index(s)).contains(&k) {
            return Err(Error::InvalidParameter(format!(
                "e^(ζ_K) is not a normal f64 for K = {k}; use K ≤ {}",
                max_disk_index(s)
            )));
        }
        let lo = zeta(k);
        let mut windows: Vec<(f64, f64)> = (FIRST_INDEX..=k)
            .map(|j| ((zeta(j) - s.window).max(lo), (zeta(j) + s.window).min(0.0)))
            .filter(|(p, q)| q > p)
            .collect();
        windows.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (p, q) in windows {
            match merged.last_mut() {
                Some(m) if p <= m.1 => m.1 = m.1.max(q),
                _ => merged.push((p, q)),
            }
        }
        let integrand = |r: C64| C64::new(self.gprime_unchecked(C64::new(r.re, 0.0)).norm(), 0.0);
        // geometric sub-panels of ratio e^{1/2}, each with a share of the budget
        let pieces: Vec<(f64, f64)> = merged
            .iter()
            .flat_map(|&(p, q)| {
                let n = (2.0 * (q - p)).ceil() as usize;
                (0..n).map(move |i| (p + (q - p) * i as f64 / n as f64, p + (q - p) * (i + 1) as f64 / n as f64))
            })
            .collect();
        let parts: Vec<f64> = pieces
            .par_iter()
            .map(|&(p, q)| {
                let seg = Segment::line(C64::new(p.exp(), 0.0), C64::new(q.exp(), 0.0));
                integrate_segment(&integrand, &seg, DISK_TOL / pieces.len() as f64)
                    .map(|r| r.value.re)
            })
            .collect::<Result<_>>()?;
        Ok(parts.iter().sum())
    }
}

/// `∫_ζ^0 h f` split at `Re ζ`: the vertical leg `[ζ, Re ζ]` then the real
/// segment `[Re ζ, 0]`. Equals `−T_g[h̃](e^ζ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoLeg {
    pub vertical: C64,
    pub horizontal: C64,
    pub total: C64,
}

pub fn two_leg_pairing(s: &OscillatingGaussianSeries, h: &TestFunction, zeta0: C64) -> Result<TwoLeg> {
    if !super::series::in_omega(zeta0) {
        return Err(Error::OutsideDomain { re: zeta0.re, im: zeta0.im });
    }
    let hf = |xi: C64| h.eval(s, xi);
    if zeta0.re >= 0.0 {
        let v = integrate_f_segment(s, &hf, zeta0, C64::new(0.0, 0.0), VARIATION_TOL)?;
        return Ok(TwoLeg { vertical: C64::new(0.0, 0.0), horizontal: v, total: v });
    }
    let foot = C64::new(zeta0.re, 0.0);
    let vertical = if zeta0.im == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        integrate_f_segment(s, &hf, zeta0, foot, VARIATION_TOL)?
    };
    let horizontal = pairing_integral(s, h, zeta0.re)?;
    Ok(TwoLeg { vertical, horizontal, total: vertical + horizontal })
}

/// `|T_g[h̃](z)| / ‖h‖` over `z = e^ζ` with `Re ζ ∈ {−2^j}` and several
/// heights, for every member of the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TgSweep {
    pub points: usize,
    pub max_ratio: f64,
    pub at: [f64; 2],
    /// `max |vertical| / ‖h‖`, at most `(π/2) sup|f|`.
    pub max_vertical: f64,
    pub vertical_bound: f64,
}

pub const SWEEP_HEIGHTS: [f64; 7] = [0.0, 0.5, -0.5, 1.0, -1.0, 1.5, -1.5];

pub fn tg_sweep(s: &OscillatingGaussianSeries, family: &[TestFunction], reals: &[f64], sup_f: f64) -> Result<TgSweep> {
    let pts: Vec<C64> =
        reals.iter().flat_map(|&x| SWEEP_HEIGHTS.iter().map(move |&y| C64::new(x, y))).collect();
    let rows: Vec<(f64, f64, C64)> = pts
        .par_iter()
        .map(|&z| {
            let mut worst = (0.0f64, 0.0f64);
            for h in family {
                let t = two_leg_pairing(s, h, z)?;
                worst.0 = worst.0.max(t.total.norm() / h.norm);
                worst.1 = worst.1.max(t.vertical.norm() / h.norm);
            }
            Ok((worst.0, worst.1, z))
        })
        .collect::<Result<_>>()?;
    let best = rows.iter().fold((0.0, C64::new(0.0, 0.0)), |b, r| if r.0 > b.0 { (r.0, r.2) } else { b });
    Ok(TgSweep {
        points: pts.len(),
        max_ratio: best.0,
        at: [best.1.re, best.1.im],
        max_vertical: rows.iter().map(|r| r.1).fold(0.0, f64::max),
        vertical_bound: FRAC_PI_2 * sup_f,
    })
}

#[cfg(test)]
mod tests {
    use super::super::pairing::{test_family, TestKind};
    use super::super::series::{radial_variation_f, sup_f};
    use super::*;
    use crate::numerics::integrate_bumps;
    use crate::operator::apply_tg;
    use crate::Point;

    #[test]
    fn rejects_points_outside_the_disk() {
        let g = disk_symbol(&OscillatingGaussianSeries::default());
        assert!(g.gprime(C64::new(0.0, 0.0)).is_err());
        assert!(g.gprime(C64::new(2.5, 0.0)).is_err());
        assert!(g.gprime(C64::new(0.5, 0.1)).is_ok());
    }

    #[test]
    fn change_of_variables_matches_v() {
        let s = OscillatingGaussianSeries::default();
        let g = disk_symbol(&s);
        assert_eq!(max_disk_index(&s), 9);
        let rv = radial_variation_f(&s, 3, 9).unwrap();
        for (k, v) in rv.k.iter().zip(&rv.v) {
            let d = g.radial_variation(*k).unwrap();
            assert!((d - v).abs() <= 1e-6 * v, "K = {k}: {d} vs {v}");
        }
        assert!(g.radial_variation(10).is_err());
    }

    #[test]
    fn tg_on_unit_disk_matches_bump_oracle() {
        let s = OscillatingGaussianSeries::default();
        let g = disk_symbol(&s);
        let w = -0.9;
        let tg = apply_tg(&|_| C64::new(1.0, 0.0), &|t| g.gprime_unit_disk(t), Point::new(w, 0.0).unwrap(), 1e-12)
            .unwrap();
        // T_g 1(w) = g(w + 1) − g(1) = ∫_0^{log(w+1)} f
        let oracle = -integrate_bumps(
            &|x: f64| s.eval(C64::new(x, 0.0)),
            &s.centers(),
            s.window,
            (1.0f64 + w).ln(),
            0.0,
            1e-13,
        )
        .unwrap()
        .value;
        assert!((tg - oracle).norm() < 1e-10, "{tg} vs {oracle}");
        assert!((g.g(C64::new(1.0 + w, 0.0)).unwrap() - oracle).norm() < 1e-10);
    }

    #[test]
    fn legs_agree_with_a_direct_path() {
        let s = OscillatingGaussianSeries::default();
        let h = TestFunction { kind: TestKind::Exp { s: 1.0 }, norm: FRAC_PI_2.exp() };
        let z = C64::new(-3.0, 1.2);
        let legs = two_leg_pairing(&s, &h, z).unwrap();
        let direct = integrate_f_segment(&s, &|xi| h.eval(&s, xi), z, C64::new(0.0, 0.0), 1e-13).unwrap();
        assert!((legs.total - direct).norm() < 1e-10);
    }

    #[test]
    fn vertical_legs_obey_the_length_bound() {
        let s = OscillatingGaussianSeries::default();
        let sup = sup_f(&s, 0.1).unwrap();
        let fam = test_family(&sup);
        let reals: Vec<f64> = (3..=12).map(|j| -(2.0f64).powi(j)).collect();
        let sw = tg_sweep(&s, &fam, &reals, sup.sup.max(sup.sup_fine)).unwrap();
        assert!(sw.max_vertical <= sw.vertical_bound);
        assert!(sw.max_ratio.is_finite());
    }
}
