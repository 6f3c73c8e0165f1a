use std::f64::consts::{FRAC_PI_4, PI};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::correction::real_stops;
use super::{
    build_g, build_h, build_h0, build_partition, extend_reflect_smooth, fit_local_polys, symmetrize_transport,
    transport_to_strip, vertical_rescale, ApproximantPhi, BlochFunction, CertGrid, ConjugateBound, Correction,
    SigmaSplit, DEFAULT_EVAL_WINDOW, FD_STEP,
};
use crate::error::{Error, Result};
use crate::numerics::wirtinger;
use crate::report::Table;
use crate::C64;

/// Tolerance on the sampled `∂̄h`.
pub const DBAR_TOLERANCE: f64 = 1e-5;

/// Bloch function fed to the pipeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Instance {
    /// `−i log φ′ ∘ ψ_β` for the spiral map with parameter `c`.
    Spiral { c: f64 },
    /// `log w`.
    Log,
    /// A real constant, which the scheme must reproduce exactly.
    Constant { value: f64 },
}

impl Instance {
    pub fn bloch(&self, alpha: f64, beta: f64) -> Result<BlochFunction> {
        match *self {
            Instance::Spiral { c } => BlochFunction::spiral(alpha, beta, c),
            Instance::Log => BlochFunction::log(alpha),
            Instance::Constant { value } => BlochFunction::constant(alpha, C64::new(value, 0.0)),
        }
    }
}

/// JSON run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDescriptor {
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    /// Scales `m`, each run independently on the shared `H₀`.
    pub m: Vec<usize>,
    /// Partition window `W`.
    #[serde(rename = "W")]
    pub k_window: usize,
    /// Certification grid spacing; the conjugate bound also uses half of it.
    pub resolution: f64,
    #[serde(default = "default_dbar_tol")]
    pub dbar_tol: f64,
    pub instance: Instance,
}

fn default_dbar_tol() -> f64 {
    DBAR_TOLERANCE
}

impl PipelineDescriptor {
    /// `c = 1/4`, `α = π/3`, `β = π/2`, `b = 1`, `m ∈ {4, 8, 16}`, `W = 6`.
    pub fn spiral_default() -> Self {
        Self {
            alpha: PI / 3.0,
            beta: PI / 2.0,
            b: 1.0,
            m: vec![4, 8, 16],
            k_window: 6,
            resolution: 0.05,
            dbar_tol: DBAR_TOLERANCE,
            instance: Instance::Spiral { c: 0.25 },
        }
    }

    /// `x_cert = b(m + 2W)`.
    pub fn x_cert(&self, m: usize) -> f64 {
        self.b * (m + 2 * self.k_window) as f64
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < self.beta && self.beta < PI) {
            return Err(Error::InvalidParameter("need 0 < alpha < beta < π".into()));
        }
        if !(self.b > 0.0 && self.resolution > 0.0 && self.dbar_tol > 0.0) {
            return Err(Error::InvalidParameter("b, resolution and dbar_tol must be positive".into()));
        }
        if self.m.is_empty() || self.m.iter().any(|&m| m < 2) {
            return Err(Error::InvalidParameter("m must be a nonempty list of integers ≥ 2".into()));
        }
        Ok(())
    }
}

/// Measured constants for one `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub m: usize,
    pub degree: usize,
    pub lambda_cap: f64,
    pub lipschitz: f64,
    pub max_fit_error: f64,
    pub fit_constant: f64,
    pub x_cert: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub epsilon_at: f64,
    pub c4: f64,
    pub dbar_g_residual: f64,
    pub sigma: SigmaSplit,
    pub growth_checks: usize,
    pub growth_violations: usize,
    pub dbar_h_residual: f64,
    pub dbar_h_worst: [f64; 2],
    pub h_consistency: f64,
    pub c_h: f64,
    pub approx_error: f64,
    pub conjugate: ConjugateBound,
    pub x_star: Option<f64>,
}

/// Certificate for a full run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub descriptor: PipelineDescriptor,
    pub instance: String,
    pub c_f: f64,
    /// `C₁`: sampled `|∂f|` on `Π_α^{log 2}`.
    pub c1: f64,
    pub c1_worst: [f64; 2],
    /// Gradient bound of the extension.
    pub c_ext: f64,
    /// `C₃`: gradient bound of the rescaled `H`.
    pub c3: f64,
    pub c3_worst: [f64; 2],
    pub w_floor: f64,
    pub w_floor_at: [f64; 2],
    pub identity_residual: f64,
    pub c5: f64,
    pub c_sum_de: f64,
    pub c6: f64,
    pub c7: f64,
    pub dbar_h0_residual: f64,
    pub scales: Vec<ScaleReport>,
}

impl PipelineReport {
    /// Named pass/fail checks in a fixed order.
    pub fn checks(&self) -> Vec<(String, bool)> {
        let tol = self.descriptor.dbar_tol;
        let mut out = vec![
            ("partition_floor".to_string(), self.w_floor > super::PARTITION_FLOOR),
            ("partition_identity".to_string(), self.identity_residual <= 1e-12),
            ("dbar_h0".to_string(), self.dbar_h0_residual <= tol),
        ];
        for s in &self.scales {
            out.push((format!("dbar_g_m{}", s.m), s.dbar_g_residual <= tol));
            out.push((format!("dbar_h_m{}", s.m), s.dbar_h_residual <= tol));
            out.push((format!("conjugate_bound_m{}", s.m), s.conjugate.holds()));
            out.push((format!("c_phi_stable_m{}", s.m), s.conjugate.stability <= 0.1));
        }
        let eps: Vec<f64> = self.scales.iter().map(|s| s.epsilon).collect();
        out.push(("epsilon_decreasing".to_string(), eps.windows(2).all(|w| w[1] < w[0])));
        if let Some(last) = self.scales.last() {
            out.push(("epsilon_final_le_pi_4".to_string(), last.epsilon <= FRAC_PI_4));
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|(_, ok)| *ok)
    }
}

/// Report plus the assembled functions.
#[derive(Clone)]
pub struct PipelineRun {
    pub report: PipelineReport,
    pub corrections: Vec<Correction>,
    pub approximants: Vec<ApproximantPhi>,
}

impl PipelineRun {
    /// The approximant with the largest `m`.
    pub fn finest(&self) -> &ApproximantPhi {
        self.approximants.last().expect("at least one scale")
    }
}

/// Symmetrize, transport, extend, rescale, partition, correct, and
/// certify, for every `m` in the descriptor.
pub fn run_pipeline(desc: &PipelineDescriptor) -> Result<PipelineRun> {
    desc.validate()?;
    let (alpha, beta) = (desc.alpha, desc.beta);
    let m_max = *desc.m.iter().max().expect("validated");
    let x_hi = desc.x_cert(m_max);
    let res = desc.resolution;

    let bloch = desc.instance.bloch(alpha, beta)?.symmetrized()?;
    let f = transport_to_strip(&bloch, x_hi + 1.0, res);
    let alpha_grid = CertGrid::new(0.0, x_hi, alpha / 2.0, res);
    let fstar = extend_reflect_smooth(&f, &alpha_grid)?;
    let grid = CertGrid::new(0.0, x_hi, beta / 2.0, res);
    let h = vertical_rescale(&fstar, alpha, beta, &grid)?;
    let pou = build_partition(desc.b, beta, desc.k_window, &grid)?;
    let h0 = build_h0(h.field(), &pou, DEFAULT_EVAL_WINDOW, &grid)?;
    log::info!("H0 built: c6 = {}, c7 = {}", h0.c6, h0.c7);

    let mut scales = Vec::new();
    let mut corrections = Vec::new();
    let mut approximants = Vec::new();
    for &m in &desc.m {
        let x_cert = desc.x_cert(m);
        let grid_m = CertGrid::new(0.0, x_cert, beta / 2.0, res);
        let scheme = fit_local_polys(&h0, m, x_cert + 1.0)?;
        let g = build_g(&scheme, &grid_m, x_cert)?;
        let hm = build_h(&g, desc.dbar_tol)?;
        let phi = symmetrize_transport(&hm, beta, res)?;
        log::info!("m = {m}: degree {}, epsilon {}", scheme.degree, g.epsilon);
        scales.push(ScaleReport {
            m,
            degree: scheme.degree,
            lambda_cap: scheme.lambda_cap,
            lipschitz: scheme.lipschitz,
            max_fit_error: scheme.fit_errors.iter().fold(0.0, |a: f64, &e| a.max(e)),
            fit_constant: scheme.fit_constant,
            x_cert,
            delta: hm.delta,
            epsilon: g.epsilon,
            epsilon_at: g.epsilon_at,
            c4: g.c4,
            dbar_g_residual: g.dbar_residual,
            sigma: g.sigma,
            growth_checks: g.growth_checks,
            growth_violations: g.growth_violations,
            dbar_h_residual: hm.dbar_residual,
            dbar_h_worst: [hm.dbar_worst.re, hm.dbar_worst.im],
            h_consistency: hm.consistency,
            c_h: hm.c_h,
            approx_error: hm.approx_error,
            conjugate: phi.conjugate,
            x_star: phi.x_star,
        });
        corrections.push(g);
        approximants.push(phi);
    }

    let report = PipelineReport {
        descriptor: desc.clone(),
        instance: bloch.name().to_string(),
        c_f: bloch.c_f(),
        c1: f.c_lip(),
        c1_worst: [f.worst_point().re, f.worst_point().im],
        c_ext: fstar.c_lip(),
        c3: h.c3,
        c3_worst: [h.worst.re, h.worst.im],
        w_floor: pou.w_floor,
        w_floor_at: pou.w_floor_at,
        identity_residual: pou.identity_residual,
        c5: pou.c_sum_e,
        c_sum_de: pou.c_sum_de,
        c6: h0.c6,
        c7: h0.c7,
        dbar_h0_residual: h0.dbar_residual,
        scales,
    };
    Ok(PipelineRun { report, corrections, approximants })
}

/// Real-axis profiles `(m, x, |f − h|, |g|, |∂̄h|)` on `[0, x_cert]`.
pub fn profiles_table(run: &PipelineRun) -> Table {
    let mut t = Table::new(["m", "x", "abs_f_minus_h", "abs_g", "abs_dbar_h"]);
    let res = run.report.descriptor.resolution;
    for (g, phi) in run.corrections.iter().zip(&run.approximants) {
        let h = phi.analytic_h();
        let hf = |z: C64| h.eval(z);
        for x in real_stops(0.0, g.x_cert, res) {
            let z = C64::new(x, 0.0);
            let row = vec![
                phi.m as f64,
                x,
                (h.source(z) - h.eval(z)).norm(),
                g.eval(z).norm(),
                wirtinger(&hf, z, FD_STEP).1.norm(),
            ];
            t.push(row).expect("fixed width");
        }
    }
    t
}

pub fn write_profiles_csv(run: &PipelineRun, path: &Path) -> Result<()> {
    profiles_table(run).write(path)
}
