use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CertGrid;
use crate::error::{Error, Result};
use crate::C64;

/// Truncation `|Re z/b − k| ≤ W` for the certified identity.
pub const DEFAULT_K_WINDOW: usize = 6;
/// `build_partition` fails when `inf |w|` on the grid is at or below this.
pub const PARTITION_FLOOR: f64 = 0.05;
/// Half-width used as the untruncated reference sum (`e^{−26²}` underflows
/// against every other term).
const REFERENCE_WINDOW: usize = 26;

/// Normalized weights `e_k = e^{−(z/b−k)²}/w` on the window `lo..lo+len`.
#[derive(Debug, Clone)]
pub struct Weights {
    pub lo: usize,
    pub e: Vec<C64>,
    /// `|w(z)|` over the same window.
    pub w_abs: f64,
}

/// First index and length of the `k`-window centered at `Re z/b`.
fn window(z: C64, b: f64, half: usize) -> usize {
    let n = (z.re / b).round();
    if n <= half as f64 {
        0
    } else {
        (n as usize) - half
    }
}

/// Weights over `2·half + 1` consecutive `k ≥ 0` nearest `Re z/b`,
/// normalized by their own sum.
///
/// Terms are scaled by the largest one and generated outward from it with
/// `g_{k±1}/g_k = e^{±2(u−k) − 1}`, whose multipliers shrink by `e^{−2}` per
/// step, so only two complex exponentials are taken per point.
pub fn partition_weights(z: C64, b: f64, half: usize) -> Weights {
    let lo = window(z, b, half);
    let len = 2 * half + 1;
    let u = z / b;
    let c = (u.re.round().max(lo as f64) as usize).min(lo + len - 1);
    let d = u - c as f64;
    let a = -(d * d);
    let shift = a.re;
    let mut e = vec![C64::new(0.0, 0.0); len];
    let i0 = c - lo;
    e[i0] = C64::from_polar(1.0, a.im);
    let step = (-2.0f64).exp();
    let mut t = e[i0];
    let mut m = (d * 2.0 - 1.0).exp();
    for v in e.iter_mut().skip(i0 + 1) {
        t *= m;
        m *= step;
        *v = t;
    }
    let mut t = e[i0];
    let mut m = (-d * 2.0 - 1.0).exp();
    for v in e[..i0].iter_mut().rev() {
        t *= m;
        m *= step;
        *v = t;
    }
    let s: C64 = e.iter().sum();
    for v in e.iter_mut() {
        *v /= s;
    }
    Weights { lo, e, w_abs: shift.exp() * s.norm() }
}

/// Certified analytic partition of unity on `Π_β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionOfUnity {
    pub b: f64,
    pub beta: f64,
    pub k_window: usize,
    /// Lower bound for `inf |w|` over the cells of the certification grid.
    pub w_floor: f64,
    pub w_floor_at: [f64; 2],
    /// `sup |Σ_{|k − Re z/b| ≤ W} e_k − 1|` with `e_k` normalized by the
    /// untruncated `w`.
    pub identity_residual: f64,
    /// `sup Σ |e_k|`.
    pub c_sum_e: f64,
    /// `sup Σ |∂e_k|`.
    pub c_sum_de: f64,
    pub grid: CertGrid,
}

impl PartitionOfUnity {
    pub fn weights(&self, z: C64, half: usize) -> Weights {
        partition_weights(z, self.b, half)
    }
}

struct Sample {
    w: f64,
    at: C64,
    resid: f64,
    sum_e: f64,
    sum_de: f64,
}

fn certify_point(z: C64, b: f64, half: usize, r: f64) -> Sample {
    let full = partition_weights(z, b, REFERENCE_WINDOW.max(half));
    // the truncated window sits inside the reference one
    let lo = window(z, b, half);
    let mut partial = C64::new(0.0, 0.0);
    let mut sum_e = 0.0;
    let mut mean_da = C64::new(0.0, 0.0);
    let da = |k: usize| -(z / b - k as f64) * (2.0 / b);
    for (i, &e) in full.e.iter().enumerate() {
        let k = full.lo + i;
        mean_da += e * da(k);
        if k >= lo && k <= lo + 2 * half {
            partial += e;
        }
    }
    let mut sum_de = 0.0;
    for (i, &e) in full.e.iter().enumerate() {
        let k = full.lo + i;
        sum_e += e.norm();
        sum_de += (e * (da(k) - mean_da)).norm();
    }
    // the truncated w is w_full · Σ_window e_k; first-order lower bound over
    // the cell: |w| − r|w′|, with w′ = w_full · Σ e_k a_k′
    let w = full.w_abs * (partial.norm() - r * mean_da.norm());
    Sample { w, at: z, resid: (partial - 1.0).norm(), sum_e, sum_de }
}

/// Zeros of `w` are spaced `b` apart, so the sweep refines to `b/32` and
/// bounds `|w|` from below on each cell rather than at its center.
fn sweep(b: f64, half: usize, grid: &CertGrid) -> Sample {
    let fine = CertGrid { resolution: grid.resolution.min(b / 32.0), ..*grid };
    let r = fine.resolution * std::f64::consts::FRAC_1_SQRT_2;
    fine.points()
        .par_iter()
        .map(|&z| certify_point(z, b, half, r))
        .reduce(
            || Sample { w: f64::INFINITY, at: C64::new(f64::NAN, f64::NAN), resid: 0.0, sum_e: 0.0, sum_de: 0.0 },
            merge,
        )
}

/// Like `sweep`, but gives up at the first cell below the floor.
fn sweep_until_failure(b: f64, half: usize, grid: &CertGrid) -> std::result::Result<Sample, Sample> {
    let fine = CertGrid { resolution: grid.resolution.min(b / 32.0), ..*grid };
    let r = fine.resolution * std::f64::consts::FRAC_1_SQRT_2;
    fine.points()
        .par_iter()
        .map(|&z| {
            let s = certify_point(z, b, half, r);
            if s.w > PARTITION_FLOOR { Ok(s) } else { Err(s) }
        })
        .try_reduce(
            || Sample { w: f64::INFINITY, at: C64::new(f64::NAN, f64::NAN), resid: 0.0, sum_e: 0.0, sum_de: 0.0 },
            |a, c| Ok(merge(a, c)),
        )
}

fn merge(a: Sample, c: Sample) -> Sample {
    Sample {
        w: a.w.min(c.w),
        at: if c.w < a.w { c.at } else { a.at },
        resid: a.resid.max(c.resid),
        sum_e: a.sum_e.max(c.sum_e),
        sum_de: a.sum_de.max(c.sum_de),
    }
}

fn certified(b: f64, beta: f64, k_window: usize, grid: &CertGrid, s: Sample) -> PartitionOfUnity {
    PartitionOfUnity {
        b,
        beta,
        k_window,
        w_floor: s.w,
        w_floor_at: [s.at.re, s.at.im],
        identity_residual: s.resid,
        c_sum_e: s.sum_e,
        c_sum_de: s.sum_de,
        grid: *grid,
    }
}

/// Sweeps `grid` and certifies `inf |w| > PARTITION_FLOOR`.
pub fn build_partition(b: f64, beta: f64, k_window: usize, grid: &CertGrid) -> Result<PartitionOfUnity> {
    if !(b > 0.0) || k_window < 4 {
        return Err(Error::InvalidParameter("need b > 0 and W ≥ 4".into()));
    }
    let s = sweep(b, k_window, grid);
    if !(s.w > PARTITION_FLOOR) {
        return Err(Error::PartitionFloor { floor: s.w, re: s.at.re, im: s.at.im });
    }
    Ok(certified(b, beta, k_window, grid, s))
}

/// Smallest `b` in `bracket` (to `tol`) whose partition certifies on `grid`.
pub fn bisect_partition_b(
    beta: f64,
    k_window: usize,
    grid: &CertGrid,
    bracket: (f64, f64),
    tol: f64,
) -> Result<PartitionOfUnity> {
    let (mut lo, mut hi) = bracket;
    if let Ok(p) = build_partition(lo, beta, k_window, grid) {
        return Ok(p);
    }
    let mut best = build_partition(hi, beta, k_window, grid)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        // a failing probe stops at its first bad cell
        match sweep_until_failure(mid, k_window, grid) {
            Ok(s) => {
                hi = mid;
                best = certified(mid, beta, k_window, grid, s);
            }
            Err(_) => lo = mid,
        }
    }
    Ok(best)
}
