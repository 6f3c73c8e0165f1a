use std::f64::consts::{FRAC_PI_4, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpiralMap;
use crate::dbar::{run_pipeline, ApproximantPhi, Instance, PipelineDescriptor, PipelineReport, PipelineRun};
use crate::error::{Error, Result};
use crate::geometry::{build_psi_beta, PsiBeta};
use crate::numerics::{integrate_segment, Segment};
use crate::report::Table;
use crate::C64;

/// Samples on the collar circle for the injectivity probe.
const PROBE_SAMPLES: usize = 10_000;
/// The probe circle sits at `1 − e^{−PROBE_DEPTH}` (or inside the univalence
/// radius, whichever is smaller).
const PROBE_DEPTH: f64 = 9.0;

/// Injectivity probe on the image of a circle: the image polygon must be
/// simple and wind once around `φ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollarProbe {
    pub radius: f64,
    pub samples: usize,
    pub self_intersections: usize,
    pub winding: i64,
    /// Smallest distance between images of non-adjacent samples.
    pub min_separation: f64,
}

/// The spiral map with its normalization, distortion and injectivity
/// certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivalentMapSpec {
    map: SpiralMap,
    pub dphi0_error: f64,
    pub normalized: bool,
    /// Sampled `sup (1−|z|²)|φ″/φ′|`.
    pub bloch_const: f64,
    /// Closed form `2√(1+c²)`, the limit along the radius to 1.
    pub bloch_limit: f64,
    /// `φ` is injective on `|z| < univalent_radius` (and not beyond).
    pub univalent_radius: f64,
    pub probe: CollarProbe,
}

impl UnivalentMapSpec {
    pub fn map(&self) -> &SpiralMap {
        &self.map
    }

    pub fn c(&self) -> f64 {
        self.map.c()
    }

    pub fn phi(&self, z: C64) -> C64 {
        self.map.phi(z)
    }

    pub fn dphi(&self, z: C64) -> C64 {
        self.map.dphi(z)
    }
}

fn segments_cross(a: C64, b: C64, c: C64, d: C64) -> bool {
    let cross = |o: C64, p: C64, q: C64| (p - o).re * (q - o).im - (p - o).im * (q - o).re;
    let (d1, d2) = (cross(a, b, c), cross(a, b, d));
    let (d3, d4) = (cross(c, d, a), cross(c, d, b));
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Angles on the circle `|z| = r` spaced evenly in image arclength
/// (`|φ′| r dθ`), which crowds them near `z = 1`.
fn collar_angles(map: &SpiralMap, r: f64, n: usize) -> Vec<f64> {
    let fine = 64 * n;
    let dens: Vec<f64> = (0..fine)
        .map(|j| {
            let th = TAU * (j as f64 + 0.5) / fine as f64;
            map.dphi(C64::from_polar(r, th)).norm() + 1.0
        })
        .collect();
    let total: f64 = dens.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut next = 0.0;
    for (j, d) in dens.iter().enumerate() {
        while next <= acc + d && out.len() < n {
            let frac = (next - acc) / d;
            out.push(TAU * (j as f64 + frac) / fine as f64);
            next += total / n as f64;
        }
        acc += d;
    }
    out
}

fn collar_probe(map: &SpiralMap, r: f64, n: usize) -> CollarProbe {
    let pts: Vec<C64> = collar_angles(map, r, n).into_iter().map(|t| map.phi(C64::from_polar(r, t))).collect();
    let n = pts.len();
    let edge = |i: usize| (pts[i], pts[(i + 1) % n]);
    let (self_intersections, min_separation) = (0..n)
        .into_par_iter()
        .map(|i| {
            let (a, b) = edge(i);
            let (lo_x, hi_x) = (a.re.min(b.re), a.re.max(b.re));
            let (lo_y, hi_y) = (a.im.min(b.im), a.im.max(b.im));
            let mut hits = 0;
            let mut sep = f64::INFINITY;
            for j in i + 2..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (c, d) = edge(j);
                sep = sep.min((a - c).norm());
                if c.re.max(d.re) < lo_x || c.re.min(d.re) > hi_x || c.im.max(d.im) < lo_y || c.im.min(d.im) > hi_y {
                    continue;
                }
                if segments_cross(a, b, c, d) {
                    hits += 1;
                }
            }
            (hits, sep)
        })
        .reduce(|| (0, f64::INFINITY), |x, y| (x.0 + y.0, x.1.min(y.1)));
    let mut turn = 0.0;
    for i in 0..n {
        let (a, b) = edge(i);
        turn += (b / a).arg();
    }
    CollarProbe { radius: r, samples: n, self_intersections, winding: (turn / TAU).round() as i64, min_separation }
}

/// Builds the spiral map for `0 < c ≤ 1/2` and runs its certificates.
pub fn make_spiral_map(c: f64) -> Result<UnivalentMapSpec> {
    let map = SpiralMap::new(c)?;
    let dphi0_error = (map.dphi(C64::new(0.0, 0.0)) - 1.0).norm();
    // polar grid crowding toward the boundary
    let bloch_const = (1..=400)
        .into_par_iter()
        .map(|i| {
            let r = 1.0 - (-(i as f64) * 0.05).exp();
            (0..256)
                .map(|j| {
                    let z = C64::from_polar(r, TAU * j as f64 / 256.0);
                    (1.0 - r * r) * (map.d2phi(z) / map.dphi(z)).norm()
                })
                .fold(0.0f64, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let univalent_radius = map.univalent_radius();
    let probe_radius = (1.0 - (-PROBE_DEPTH).exp()).min(univalent_radius);
    let probe = collar_probe(&map, probe_radius, PROBE_SAMPLES);
    if probe.self_intersections > 0 || probe.winding != 1 {
        return Err(Error::NotUnivalent(format!(
            "{} crossings, winding {} on |z| = {probe_radius}",
            probe.self_intersections, probe.winding
        )));
    }
    Ok(UnivalentMapSpec {
        map,
        dphi0_error,
        normalized: dphi0_error <= 1e-10,
        bloch_const,
        bloch_limit: 2.0 * (1.0 + c * c).sqrt(),
        univalent_radius,
        probe,
    })
}

/// `g = exp(−iΦ) ∘ ψ_β^{−1}` on the disk.
#[derive(Clone)]
pub struct WitnessFunction {
    phi: ApproximantPhi,
    psi: PsiBeta<f64>,
    /// `C₂ = (β/2)·C_phi`, the certified bound for `|ũ|`.
    pub c2: f64,
    /// `e^{C₂}`.
    pub sup_bound: f64,
    pub sampled_sup: f64,
    pub samples: usize,
    /// `m` of the approximant this was built from.
    pub m: usize,
}

impl std::fmt::Debug for WitnessFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WitnessFunction")
            .field("m", &self.m)
            .field("c2", &self.c2)
            .field("sup_bound", &self.sup_bound)
            .field("sampled_sup", &self.sampled_sup)
            .finish()
    }
}

impl WitnessFunction {
    pub fn new(phi: ApproximantPhi, beta: f64) -> Result<Self> {
        let psi = build_psi_beta(beta)?;
        let c2 = phi.conjugate.bound;
        let mut w = Self { m: phi.m, phi, psi, c2, sup_bound: c2.exp(), sampled_sup: 0.0, samples: 0 };
        // polar disk grid whose preimages stay below x_cert
        let x_cert = w.phi.x_cert;
        let pts: Vec<C64> = (0..80)
            .flat_map(|i| {
                let rho = 1.0 - (-(0.1 * i as f64)).exp() * (1.0 - 1e-9);
                (0..128).map(move |j| C64::from_polar(rho, TAU * j as f64 / 128.0))
            })
            .collect();
        let vals: Vec<Option<f64>> = pts
            .par_iter()
            .map(|&zeta| {
                let u = w.psi.inverse(zeta);
                (-u.norm().ln() <= x_cert).then(|| w.eval_preimage(u).norm())
            })
            .collect();
        w.samples = vals.iter().flatten().count();
        w.sampled_sup = vals.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
        Ok(w)
    }

    fn eval_preimage(&self, w: C64) -> C64 {
        (-C64::new(0.0, 1.0) * self.phi.eval(w)).exp()
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        self.eval_preimage(self.psi.inverse(zeta))
    }

    /// `g(1 − δ)` computed through `δ`.
    pub fn eval_from_complement(&self, delta: f64) -> C64 {
        self.eval_preimage(self.psi.inverse_from_complement(C64::new(delta, 0.0)))
    }

    /// `u(ψ_β^{−1}(t)) = Re Φ` at `t = 1 − δ`.
    pub fn phase_from_complement(&self, delta: f64) -> f64 {
        self.phi.eval(self.psi.inverse_from_complement(C64::new(delta, 0.0))).re
    }

    pub fn approximant(&self) -> &ApproximantPhi {
        &self.phi
    }
}

/// One stop of the lower-bound table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessRow {
    pub r: f64,
    /// `∫_0^r |φ′| = log 1/(1−r)`.
    pub length: f64,
    /// `Re ∫_0^r g φ′`.
    pub value: f64,
    /// `cos(π/4) e^{−C₂}(length − C₁) − C₁ e^{C₂}`.
    pub predicted: f64,
    /// `Re ∫_0^r φ′ = Re φ(r)`, the same integral without the witness.
    pub without_witness: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub c: f64,
    pub m: usize,
    pub epsilon: f64,
    pub x_star: f64,
    pub r_beta: f64,
    /// `C₁(β) = ∫_0^{r_β} |φ′|`.
    pub c1_beta: f64,
    pub c2: f64,
    pub sup_bound: f64,
    pub sampled_sup: f64,
    /// `max |arg φ′(t) − u(ψ_β^{−1}(t))|` over sampled `t ∈ (r_β, r_max]`.
    pub phase_error: f64,
    pub rows: Vec<WitnessRow>,
    pub map: UnivalentMapSpec,
    pub pipeline: PipelineReport,
}

impl WitnessReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["r", "length", "value", "predicted", "without_witness"]);
        for w in &self.rows {
            t.push(vec![w.r, w.length, w.value, w.predicted, w.without_witness]).expect("fixed width");
        }
        t
    }

    /// Every row beats the prediction, the values grow, `|g| ≤ e^{C₂}` on the
    /// samples, and the phase stays within `π/4`.
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|w| w.value >= w.predicted)
            && self.rows.windows(2).all(|w| w[1].value > w[0].value)
            && self.sampled_sup <= self.sup_bound
            && self.phase_error <= FRAC_PI_4
    }
}

/// Runs the pipeline on `F = −i log φ′ ∘ ψ_β`, builds the witness and
/// tabulates `Re ∫_0^r g φ′` against the lower bound at each stop.
pub fn witness_lower_bound(spec: &UnivalentMapSpec, desc: &PipelineDescriptor, r_stops: &[f64]) -> Result<WitnessReport> {
    check_stops(spec, r_stops)?;
    let desc = PipelineDescriptor { instance: Instance::Spiral { c: spec.c() }, ..desc.clone() };
    witness_from_run(spec, &run_pipeline(&desc)?, r_stops)
}

fn check_stops(spec: &UnivalentMapSpec, r_stops: &[f64]) -> Result<()> {
    if r_stops.is_empty() || r_stops.windows(2).any(|w| !(w[0] < w[1])) || !(r_stops[0] > 0.0) {
        return Err(Error::InvalidParameter("r_stops must increase inside (0, 1)".into()));
    }
    if !(r_stops[r_stops.len() - 1] < spec.univalent_radius) {
        return Err(Error::InvalidParameter("r_stops must stay inside the univalence radius".into()));
    }
    Ok(())
}

/// [`witness_lower_bound`] on a finished pipeline run for the same map.
pub fn witness_from_run(spec: &UnivalentMapSpec, run: &PipelineRun, r_stops: &[f64]) -> Result<WitnessReport> {
    check_stops(spec, r_stops)?;
    let desc = &run.report.descriptor;
    if desc.instance != (Instance::Spiral { c: spec.c() }) {
        return Err(Error::InvalidParameter("pipeline run is not for this spiral map".into()));
    }
    let phi = run.finest().clone();
    if !(phi.epsilon_achieved <= FRAC_PI_4) {
        return Err(Error::WitnessPhase { achieved: phi.epsilon_achieved, required: FRAC_PI_4 });
    }
    let x_star = phi.x_star.ok_or(Error::WitnessPhase { achieved: f64::INFINITY, required: FRAC_PI_4 })?;
    let psi = build_psi_beta::<f64>(desc.beta)?;
    let r_beta = psi.eval(C64::new((-x_star).exp(), 0.0)).re;
    // |φ′(t)| = 1/(1−t) on the radius
    let c1_beta = integrate_segment(
        &|t: C64| C64::new(spec.dphi(C64::new(t.re, 0.0)).norm(), 0.0),
        &Segment::line(C64::new(0.0, 0.0), C64::new(r_beta.max(0.0), 0.0)),
        1e-12,
    )?
    .value
    .re;
    let witness = WitnessFunction::new(phi, desc.beta)?;
    let (c2, c) = (witness.c2, spec.c());

    // in s = log 1/(1−x): φ′(x) dx = e^{−ics} ds
    let integrand = |s: C64| {
        let s = s.re;
        witness.eval_from_complement((-s).exp()) * C64::from_polar(1.0, -c * s)
    };
    let lengths: Vec<f64> = r_stops.iter().map(|&r| -(1.0 - r).ln()).collect();
    let pieces: Vec<f64> = (0..lengths.len())
        .into_par_iter()
        .map(|i| {
            let a = if i == 0 { 0.0 } else { lengths[i - 1] };
            let seg = Segment::line(C64::new(a, 0.0), C64::new(lengths[i], 0.0));
            integrate_segment(&integrand, &seg, 1e-10).map(|q| q.value.re)
        })
        .collect::<Result<_>>()?;
    let k = (PI / 4.0).cos();
    let mut acc = 0.0;
    let mut rows = Vec::with_capacity(r_stops.len());
    for ((&r, &s), piece) in r_stops.iter().zip(&lengths).zip(pieces) {
        acc += piece;
        rows.push(WitnessRow {
            r,
            length: s,
            value: acc,
            predicted: k * (-c2).exp() * (s - c1_beta) - c1_beta * c2.exp(),
            without_witness: spec.phi(C64::new(r, 0.0)).re,
        });
    }

    let s_lo = -(1.0 - r_beta.max(0.0)).ln();
    let s_hi = lengths[lengths.len() - 1];
    let phase_error = (0..=400)
        .into_par_iter()
        .map(|i| {
            let s = s_lo + (s_hi - s_lo) * i as f64 / 400.0;
            (spec.map().arg_dphi_real(s) - witness.phase_from_complement((-s).exp())).abs()
        })
        .reduce(|| 0.0, f64::max);

    Ok(WitnessReport {
        c,
        m: witness.m,
        epsilon: witness.approximant().epsilon_achieved,
        x_star,
        r_beta,
        c1_beta,
        c2,
        sup_bound: witness.sup_bound,
        sampled_sup: witness.sampled_sup,
        phase_error,
        rows,
        map: spec.clone(),
        pipeline: run.report.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spiral_spec_certificates() {
        let s = make_spiral_map(0.25).unwrap();
        assert!(s.normalized);
        assert!(s.bloch_const <= 6.0);
        assert!(s.bloch_const <= s.bloch_limit + 1e-12 && s.bloch_const > 0.99 * s.bloch_limit);
        assert_eq!(s.probe.self_intersections, 0);
        assert_eq!(s.probe.winding, 1);
        // ∫_0^r |φ′| = log 1/(1−r) at r = 1 − e^{−5}
        let r = 1.0 - (-5.0f64).exp();
        let v = integrate_segment(
            &|t: C64| C64::new(s.dphi(C64::new(t.re, 0.0)).norm(), 0.0),
            &Segment::line(C64::new(0.0, 0.0), C64::new(r, 0.0)),
            1e-12,
        )
        .unwrap();
        assert!((v.value.re - 5.0).abs() < 1e-9);
    }

    #[test]
    fn probe_detects_overlap_beyond_the_radius() {
        let map = SpiralMap::new(0.5).unwrap();
        let rho = map.univalent_radius();
        let p = collar_probe(&map, rho + 0.5 * (1.0 - rho), 4000);
        assert!(p.self_intersections > 0 || p.winding != 1);
    }
}
