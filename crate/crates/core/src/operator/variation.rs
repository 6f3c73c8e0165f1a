use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate_segment, Segment};
use crate::C64;

/// Growth law fitted to the partial variations against `L = log 1/(1−r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    /// `V ≈ a + b(1 − r)`, which converges as `r → 1`.
    Bounded,
    /// `V ≈ a + b L`.
    Log,
    /// `V ≈ a + b log(1 + L)`.
    LogLog,
}

impl GrowthModel {
    fn regressor(self, r: f64) -> f64 {
        let l = -(1.0 - r).ln();
        match self {
            GrowthModel::Bounded => 1.0 - r,
            GrowthModel::Log => l,
            GrowthModel::LogLog => l.ln_1p(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub intercept: f64,
    pub slope: f64,
    pub rms_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub theta: f64,
    /// `(r, ∫_0^r |g′(t e^{iθ})| dt)`.
    pub partial_variations: Vec<(f64, f64)>,
    /// Best fit first, then the others.
    pub fits: Vec<GrowthFit>,
    pub diverging: bool,
}

impl VariationReport {
    pub fn best(&self) -> &GrowthFit {
        &self.fits[0]
    }
}

fn least_squares(model: GrowthModel, pts: &[(f64, f64)]) -> GrowthFit {
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|&(r, _)| model.regressor(r)).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(pts).map(|(x, p)| (x - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(pts).map(|(x, p)| (p.1 - intercept - slope * x).powi(2)).sum();
    GrowthFit { model, intercept, slope, rms_residual: (ss / n).sqrt() }
}

/// Cumulative `∫_0^r |g′(t e^{iθ})| dt` at each stop, with a growth model
/// chosen by least residual.
pub fn radial_variation<G>(gprime: &G, theta: f64, r_stops: &[f64], tol: f64) -> Result<VariationReport>
where
    G: Fn(C64) -> C64 + ?Sized,
{
    if r_stops.is_empty() || r_stops.windows(2).any(|w| !(w[0] < w[1])) || !(r_stops[0] > 0.0) {
        return Err(Error::InvalidParameter("r_stops must increase inside (0, 1)".into()));
    }
    if !(*r_stops.last().unwrap() < 1.0) {
        return Err(Error::InvalidParameter("r_stops must increase inside (0, 1)".into()));
    }
    let dir = C64::from_polar(1.0, theta);
    let integrand = |t: C64| C64::new(gprime(dir * t.re).norm(), 0.0);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut partial = Vec::with_capacity(r_stops.len());
    for &r in r_stops {
        let seg = Segment::line(C64::new(prev, 0.0), C64::new(r, 0.0));
        acc += integrate_segment(&integrand, &seg, tol)?.value.re;
        partial.push((r, acc));
        prev = r;
    }
    let mut fits: Vec<GrowthFit> = [GrowthModel::Bounded, GrowthModel::Log, GrowthModel::LogLog]
        .into_iter()
        .map(|m| least_squares(m, &partial))
        .collect();
    fits.sort_by(|a, b| a.rms_residual.total_cmp(&b.rms_residual));
    let diverging = fits[0].model != GrowthModel::Bounded && fits[0].slope > 0.0;
    Ok(VariationReport { theta, partial_variations: partial, fits, diverging })
}
