//! One function per experiment. Each writes its artifacts into `out` and
//! returns the named checks it was judged on.

use std::f64::consts::TAU;
use std::path::Path;
use std::sync::Arc;

use blochlab::counterexample::{contrast, OscillatingGaussianSeries};
use blochlab::dbar::{
    bisect_partition_b, build_partition, partition_weights, profiles_table, run_pipeline, CertGrid, Field, Instance,
    PipelineDescriptor, PipelineRun, DEFAULT_K_WINDOW, PARTITION_FLOOR,
};
use blochlab::geometry::{interior_diameter, DiscretizedDomain, DomainDescriptor, Shape};
use blochlab::operator::{jp_ratio_sweep, make_spiral_map, witness_from_run};
use blochlab::report::{write_atomic, write_json, Table};
use blochlab::{Point, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub type Checks = Vec<(String, bool)>;

#[derive(Serialize)]
struct Check<'a> {
    name: &'a str,
    pass: bool,
}

#[derive(Serialize)]
struct Certificate<'a> {
    command: &'a str,
    seed: u64,
    passed: bool,
    checks: Vec<Check<'a>>,
    report: Value,
}

pub fn write_certificate(out: &Path, command: &str, seed: u64, checks: &Checks, report: Value) -> Result<(), CliError> {
    let cert = Certificate {
        command,
        seed,
        passed: checks.iter().all(|c| c.1),
        checks: checks.iter().map(|(n, p)| Check { name: n, pass: *p }).collect(),
        report,
    };
    Ok(write_json(&out.join("certificate.json"), &cert)?)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

/// Tolerance keys settable with `--tol` per command.
pub const APPROX_TOLS: &[&str] = &["dbar_tol"];
pub const PARTITION_TOLS: &[&str] = &["floor", "identity_tol", "bisect_tol"];
pub const DIAMETER_TOLS: &[&str] = &["rel_tol"];
pub const WITNESS_TOLS: &[&str] = &[];
pub const COUNTEREXAMPLE_TOLS: &[&str] = &["growth_target", "pairing_bound"];

fn scales_table(run: &PipelineRun) -> Table {
    let mut t = Table::new([
        "m",
        "degree",
        "epsilon",
        "max_fit_error",
        "dbar_g_residual",
        "dbar_h_residual",
        "sup_u_tilde",
        "conjugate_bound",
        "c_phi_drift",
    ]);
    for s in &run.report.scales {
        t.push(vec![
            s.m as f64,
            s.degree as f64,
            s.epsilon,
            s.max_fit_error,
            s.dbar_g_residual,
            s.dbar_h_residual,
            s.conjugate.sup_u_tilde,
            s.conjugate.bound,
            s.conjugate.stability,
        ])
        .expect("fixed width");
    }
    t
}

pub fn approx(desc: &PipelineDescriptor, out: &Path, seed: u64) -> Result<Checks, CliError> {
    let run = run_pipeline(desc)?;
    profiles_table(&run).write(&out.join("profiles.csv"))?;
    scales_table(&run).write(&out.join("scales.csv"))?;
    let checks = run.report.checks();
    write_certificate(out, "approx", seed, &checks, to_value(&run.report)?)?;
    Ok(checks)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionConfig {
    pub beta: f64,
    #[serde(rename = "W", default = "default_window")]
    pub k_window: usize,
    pub grid: CertGrid,
    /// Fixed `b`; without it the smallest certifying `b` in `bracket` is
    /// bisected.
    #[serde(default)]
    pub b: Option<f64>,
    #[serde(default = "default_bracket")]
    pub bracket: [f64; 2],
    #[serde(default = "default_bisect_tol")]
    pub bisect_tol: f64,
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default = "default_identity_tol")]
    pub identity_tol: f64,
}

fn default_window() -> usize {
    DEFAULT_K_WINDOW
}
fn default_bracket() -> [f64; 2] {
    [0.25, 8.0]
}
fn default_bisect_tol() -> f64 {
    1e-3
}
fn default_floor() -> f64 {
    PARTITION_FLOOR
}
fn default_identity_tol() -> f64 {
    1e-12
}

pub fn partition(cfg: &PartitionConfig, out: &Path, seed: u64) -> Result<Checks, CliError> {
    let g = &cfg.grid;
    if !(g.resolution > 0.0 && g.x_hi > g.x_lo && g.half_width > 0.0) {
        return Err(CliError::Config("grid needs x_lo < x_hi, half_width > 0, resolution > 0".into()));
    }
    if !(cfg.bracket[0] > 0.0 && cfg.bracket[0] < cfg.bracket[1]) {
        return Err(CliError::Config("bracket must satisfy 0 < lo < hi".into()));
    }
    let p = match cfg.b {
        Some(b) => build_partition(b, cfg.beta, cfg.k_window, g)?,
        None => bisect_partition_b(cfg.beta, cfg.k_window, g, (cfg.bracket[0], cfg.bracket[1]), cfg.bisect_tol)?,
    };
    // |w| along the axis and the two edges of the grid
    let mut t = Table::new(["x", "abs_w_axis", "abs_w_upper", "abs_w_lower"]);
    for x in g.xs() {
        let w = |y: f64| partition_weights(C64::new(x, y), p.b, p.k_window).w_abs;
        t.push(vec![x, w(0.0), w(g.half_width), w(-g.half_width)]).expect("fixed width");
    }
    t.write(&out.join("partition.csv"))?;
    let checks = vec![
        ("w_floor".to_string(), p.w_floor >= cfg.floor),
        ("identity_residual".to_string(), p.identity_residual <= cfg.identity_tol),
    ];
    write_certificate(out, "partition", seed, &checks, to_value(&p)?)?;
    Ok(checks)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiameterConfig {
    pub domain: DomainDescriptor,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Known diameter to compare against.
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    /// Random `J_p` test functions (seeded); disk and rectangle only.
    #[serde(default)]
    pub jp_family: usize,
    #[serde(default)]
    pub pgm: bool,
}

fn default_samples() -> usize {
    8
}
fn default_rel_tol() -> f64 {
    0.03
}

fn boundary(shape: &Shape, n: usize) -> Option<Vec<C64>> {
    match *shape {
        Shape::Disk { center, radius } => Some(
            (0..n)
                .map(|j| C64::new(center[0], center[1]) + C64::from_polar(radius * (1.0 - 1e-9), TAU * j as f64 / n as f64))
                .collect(),
        ),
        Shape::Rectangle { x0, y0, x1, y1 } => {
            let c = [C64::new(x0, y0), C64::new(x1, y0), C64::new(x1, y1), C64::new(x0, y1)];
            let per = n / 4;
            Some((0..4 * per).map(|j| c[j / per] + (c[(j / per + 1) % 4] - c[j / per]) * ((j % per) as f64 / per as f64)).collect())
        }
        _ => None,
    }
}

fn random_family(seed: u64, n: usize) -> Vec<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c: Vec<C64> = (0..6).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let a = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let f: Field =
                Arc::new(move |z: C64| c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &ci| acc * z + ci) + (a * z).exp());
            f
        })
        .collect()
}

pub fn diameter(cfg: &DiameterConfig, out: &Path, seed: u64) -> Result<Checks, CliError> {
    let d = DiscretizedDomain::from_descriptor(&cfg.domain)?;
    let est = interior_diameter(&d, cfg.samples)?;
    let mut checks = vec![("reachable".to_string(), est.unreachable_cells == 0)];
    if let Some(e) = cfg.expected {
        checks.push(("matches_expected".to_string(), (est.value - e).abs() <= cfg.rel_tol * e));
    }
    let mut t = Table::new(["diameter", "resolution", "sources", "unreachable_cells"]);
    t.push(vec![est.value, est.resolution, est.sources as f64, est.unreachable_cells as f64]).expect("fixed width");
    t.write(&out.join("diameter.csv"))?;

    let mut jp = None;
    if cfg.jp_family > 0 {
        let bd = boundary(&cfg.domain.shape, 64)
            .ok_or_else(|| CliError::Config("jp_family needs a disk or rectangle domain".into()))?;
        let family = random_family(seed, cfg.jp_family);
        // max modulus puts sup|f| on the boundary
        let sup: Vec<C64> = (0..bd.len() * 64)
            .map(|j| {
                let (a, b) = (bd[j / 64], bd[(j / 64 + 1) % bd.len()]);
                a + (b - a) * ((j % 64) as f64 / 64.0)
            })
            .collect();
        let mut t = Table::new(["p_re", "p_im", "max_ratio"]);
        let mut worst = 0.0f64;
        for &p in bd.iter().step_by(8) {
            let s = jp_ratio_sweep(&family, Point::new(p.re, p.im)?, &bd, &sup, 1e-10)?;
            worst = worst.max(s.max_ratio);
            t.push(vec![p.re, p.im, s.max_ratio]).expect("fixed width");
        }
        t.write(&out.join("jp.csv"))?;
        checks.push(("jp_below_diameter".to_string(), worst <= est.value * 1.05));
        jp = Some(worst);
    }
    if cfg.pgm {
        let mut buf = Vec::new();
        d.write_pgm(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
        write_atomic(&out.join("domain.pgm"), &buf)?;
    }
    let report = serde_json::json!({ "domain": cfg.domain, "estimate": est, "expected": cfg.expected, "jp_max_ratio": jp });
    write_certificate(out, "diameter", seed, &checks, report)?;
    Ok(checks)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessConfig {
    #[serde(default = "default_c")]
    pub c: f64,
    /// Pipeline settings; the instance is replaced by the spiral map for `c`.
    #[serde(default = "PipelineDescriptor::spiral_default")]
    pub pipeline: PipelineDescriptor,
    /// Radii `r` at which `Re ∫_0^r g φ′` is tabulated.
    #[serde(default = "default_stops")]
    pub r_stops: Vec<f64>,
}

fn default_c() -> f64 {
    0.25
}

/// `r = 1 − e^{−j/2}`, `j = 1..16`.
fn default_stops() -> Vec<f64> {
    (1..=16).map(|j| 1.0 - (-(j as f64) * 0.5).exp()).collect()
}

pub fn witness(cfg: &WitnessConfig, out: &Path, seed: u64) -> Result<Checks, CliError> {
    let spec = make_spiral_map(cfg.c)?;
    let desc = PipelineDescriptor { instance: Instance::Spiral { c: cfg.c }, ..cfg.pipeline.clone() };
    let run = run_pipeline(&desc)?;
    profiles_table(&run).write(&out.join("profiles.csv"))?;
    let w = witness_from_run(&spec, &run, &cfg.r_stops)?;
    w.table().write(&out.join("witness.csv"))?;
    let mut checks = run.report.checks();
    checks.push(("witness_beats_prediction".to_string(), w.rows.iter().all(|r| r.value >= r.predicted)));
    checks.push(("witness_grows".to_string(), w.rows.windows(2).all(|p| p[1].value > p[0].value)));
    checks.push(("witness_sup".to_string(), w.sampled_sup <= w.sup_bound));
    checks.push(("witness_phase".to_string(), w.phase_error <= std::f64::consts::FRAC_PI_4));
    write_certificate(out, "witness", seed, &checks, to_value(&w)?)?;
    Ok(checks)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterexampleConfig {
    #[serde(default)]
    pub series: OscillatingGaussianSeries,
    /// Required `V(K_max)/V(5)`; unchecked when absent.
    #[serde(default)]
    pub growth_target: Option<f64>,
    /// Ceiling on every `|∫ f h| / ‖h‖` and on the `T_g` sweep.
    #[serde(default = "default_pairing_bound")]
    pub pairing_bound: f64,
}

fn default_pairing_bound() -> f64 {
    blochlab::counterexample::PINNED_PAIRING
}

pub fn counterexample(cfg: &CounterexampleConfig, out: &Path, seed: u64) -> Result<Checks, CliError> {
    let r = contrast(&cfg.series)?;
    r.table().write(&out.join("variation.csv"))?;
    let mut t = Table::new(["h", "zeta", "value", "ratio"]);
    for (i, p) in r.pairings.iter().enumerate() {
        for (z, v) in p.zeta_endpoints.iter().zip(&p.values) {
            t.push(vec![i as f64, *z, *v, v / p.h_norm]).expect("fixed width");
        }
    }
    t.write(&out.join("pairings.csv"))?;
    let mut t = Table::new(["k", "lambda", "scaled"]);
    for i in 0..r.modes.k.len() {
        t.push(vec![r.modes.k[i] as f64, r.modes.lambda[i], r.modes.scaled[i]]).expect("fixed width");
    }
    t.write(&out.join("modes.csv"))?;
    let mut t = Table::new(["K", "disk_variation", "V", "rel_gap"]);
    for row in &r.change_of_variables {
        t.push(row.to_vec()).expect("fixed width");
    }
    t.write(&out.join("change_of_variables.csv"))?;

    let checks: Checks = r
        .checks(cfg.growth_target.unwrap_or(0.0))
        .into_iter()
        .filter(|(n, _)| cfg.growth_target.is_some() || *n != "v_growth")
        .map(|(n, ok)| match n {
            "pairing_bounded" => (n.to_string(), r.max_pairing_ratio <= cfg.pairing_bound),
            "tg_bounded" => (n.to_string(), r.tg.max_ratio <= cfg.pairing_bound),
            _ => (n.to_string(), ok),
        })
        .collect();
    let mut report = to_value(&r)?;
    report["pairing_labels"] = r.pairings.iter().map(|p| Value::from(p.h.label())).collect();
    report["growth_target"] = to_value(&cfg.growth_target)?;
    report["pairing_bound"] = Value::from(cfg.pairing_bound);
    write_certificate(out, "counterexample", seed, &checks, report)?;
    Ok(checks)
}
