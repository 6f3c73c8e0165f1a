use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{interior_diameter, DiameterEstimate, DiscretizedDomain};
use crate::numerics::{integrate_contour, integrate_segment, Segment};
use crate::{Path, Point, C64};

/// Sources used by [`upper_bound_via_diameter`].
pub const DIAMETER_SAMPLES: usize = 8;

/// `J_p f(z) = ∫_p^z f` along `path`, which must run from `p` to `z`.
pub fn apply_jp<F>(f: &F, p: Point, z: Point, path: &Path, tol: f64) -> Result<C64>
where
    F: Fn(C64) -> C64 + ?Sized,
{
    let scale = 1e-12 * (1.0 + path.length());
    if (path.start() - p.to_complex()).norm() > scale || (path.end() - z.to_complex()).norm() > scale {
        return Err(Error::InvalidParameter("path does not run from p to z".into()));
    }
    Ok(integrate_contour(f, path, tol)?.value)
}

/// `T_g f(w) = ∫_0^w f g′` along the segment `[0, w]`.
pub fn apply_tg<F, G>(f: &F, gprime: &G, w: Point, tol: f64) -> Result<C64>
where
    F: Fn(C64) -> C64 + ?Sized,
    G: Fn(C64) -> C64 + ?Sized,
{
    let seg = Segment::line(C64::new(0.0, 0.0), w.to_complex());
    Ok(integrate_segment(&|t| f(t) * gprime(t), &seg, tol)?.value)
}

/// `‖J_p‖ ≤ diam_I`: the interior diameter of `d`, after checking `p ∈ d`.
pub fn upper_bound_via_diameter(d: &DiscretizedDomain, p: Point) -> Result<DiameterEstimate> {
    let z = p.to_complex();
    if !d.contains(z) {
        return Err(Error::EndpointNotInDomain { re: z.re, im: z.im });
    }
    interior_diameter(d, DIAMETER_SAMPLES)
}

/// Largest `|J_p f(z)| / sup|f|` over a family and a set of targets, with
/// straight paths (the domain is assumed convex).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JpSweep {
    pub max_ratio: f64,
    pub at: [f64; 2],
    pub family: usize,
    pub targets: usize,
}

/// `sup_points` estimate each `sup|f|` from inside, so the ratios err on the
/// large side.
pub fn jp_ratio_sweep(
    family: &[crate::dbar::Field],
    p: Point,
    targets: &[C64],
    sup_points: &[C64],
    tol: f64,
) -> Result<JpSweep> {
    let rows = family
        .par_iter()
        .map(|f| {
            let sup = sup_points.iter().map(|&z| f(z).norm()).fold(0.0f64, f64::max);
            let mut best = (0.0f64, C64::new(0.0, 0.0));
            for &z in targets {
                let path = Path::segment(p.to_complex(), z);
                let v = apply_jp(&**f, p, Point::new(z.re, z.im)?, &path, tol)?.norm() / sup;
                if v > best.0 {
                    best = (v, z);
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<_>>>()?;
    let (max_ratio, at) = rows.into_iter().fold((0.0, C64::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });
    Ok(JpSweep { max_ratio, at: [at.re, at.im], family: family.len(), targets: targets.len() })
}
