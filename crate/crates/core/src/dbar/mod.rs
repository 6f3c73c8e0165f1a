//! The ∂̄-correction scheme: from a Bloch function on a sector to an analytic
//! function on a wider sector whose real part tracks it on the real axis and
//! whose conjugate stays bounded.
//!
//! Stages, all in strip coordinates `z = −log w`:
//! transport, reflect and smooth, vertical rescale, analytic partition of
//! unity, first modification `H₀`, local Chebyshev fits, the correction `g`,
//! the analytic `h = H − g`, and symmetrization.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::C64;

mod approximant;
mod bloch;
mod correction;
mod partition;
mod pipeline;
mod strip;

pub use approximant::{symmetrize_transport, ApproximantPhi, ConjugateBound};
pub use bloch::BlochFunction;
pub use correction::{
    build_g, build_h, build_h0, fit_local_polys, AnalyticH, Correction, CorrectionScheme, FirstModification,
    SigmaSplit, DEFAULT_EVAL_WINDOW,
};
pub use pipeline::{
    profiles_table, run_pipeline, write_profiles_csv, Instance, PipelineDescriptor, PipelineReport, PipelineRun, ScaleReport,
    DBAR_TOLERANCE,
};
pub use partition::{bisect_partition_b, build_partition, partition_weights, PartitionOfUnity, Weights, DEFAULT_K_WINDOW, PARTITION_FLOOR};
pub use strip::{extend_reflect_smooth, transport_to_strip, vertical_rescale, Rescaled, StripLipschitz};

/// Shared, thread-safe complex function.
pub type Field = Arc<dyn Fn(C64) -> C64 + Send + Sync>;

/// Cell-centered sample grid of `{x_lo < x < x_hi, |y| < half_width}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertGrid {
    pub x_lo: f64,
    pub x_hi: f64,
    pub half_width: f64,
    pub resolution: f64,
}

impl CertGrid {
    pub fn new(x_lo: f64, x_hi: f64, half_width: f64, resolution: f64) -> Self {
        Self { x_lo, x_hi, half_width, resolution }
    }

    pub fn xs(&self) -> Vec<f64> {
        let n = ((self.x_hi - self.x_lo) / self.resolution).ceil().max(1.0) as usize;
        let h = (self.x_hi - self.x_lo) / n as f64;
        (0..n).map(|i| self.x_lo + (i as f64 + 0.5) * h).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        let n = (2.0 * self.half_width / self.resolution).ceil().max(1.0) as usize;
        let h = 2.0 * self.half_width / n as f64;
        (0..n).map(|j| -self.half_width + (j as f64 + 0.5) * h).collect()
    }

    pub fn points(&self) -> Vec<C64> {
        let ys = self.ys();
        self.xs().into_iter().flat_map(|x| ys.iter().map(move |&y| C64::new(x, y))).collect()
    }
}

/// Largest value of `score` over `points`, with the point where it occurs.
pub(crate) fn grid_sup<F>(points: &[C64], score: F) -> (f64, C64)
where
    F: Fn(C64) -> f64 + Sync,
{
    use rayon::prelude::*;
    points
        .par_iter()
        .map(|&z| (score(z), z))
        .reduce(|| (f64::NEG_INFINITY, C64::new(f64::NAN, f64::NAN)), |a, b| {
            // NaN scores win so that failures surface
            if b.0.is_nan() || (!a.0.is_nan() && b.0 > a.0) {
                b
            } else {
                a
            }
        })
}

/// Finite-difference step used for all certificate checks.
pub const FD_STEP: f64 = 1e-4;
