use serde::{Deserialize, Serialize};

use super::pairing::{dyadic_endpoints, mode_check, pairing_bound, test_family, ModeReport, PairingReport};
use super::series::{radial_variation_f, sup_f, OscillatingGaussianSeries, RadialVariation, SupEstimate};
use super::symbol::{disk_symbol, max_disk_index, tg_sweep, TgSweep};
use crate::error::{Error, Result};
use crate::report::Table;

/// Regression envelope for `max |∫_ζ^0 f h| / ‖h‖`: measured 2.743 (at
/// `h ≡ 1`) times 1.1. The two-leg `T_g` sweep (measured 2.956) is held to
/// the same constant.
pub const PINNED_PAIRING: f64 = 3.02;

/// Divergence of `V(K)` against boundedness of every pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastReport {
    pub series: OscillatingGaussianSeries,
    pub sup: SupEstimate,
    pub variation: RadialVariation,
    /// `V(K_max) / V(5)`.
    pub growth_factor: f64,
    pub pairings: Vec<PairingReport>,
    pub max_pairing_ratio: f64,
    pub modes: ModeReport,
    pub tg: TgSweep,
    /// `(K, disk-side variation, V(K), relative gap)` for `K` where `e^{ζ_K}`
    /// is representable.
    pub change_of_variables: Vec<[f64; 4]>,
}

impl ContrastReport {
    pub fn table(&self) -> Table {
        let mut t = Table::new(["K", "V", "sum_a", "max_pairing_ratio"]);
        let zs = dyadic_endpoints(3, self.series.k_max as u32);
        for (i, &k) in self.variation.k.iter().enumerate() {
            // pairings up to ζ = −2^K
            let upto = zs.iter().take_while(|z| **z >= -(2.0f64).powi(k as i32)).count();
            let ratio = self
                .pairings
                .iter()
                .flat_map(|p| p.values[..upto].iter().map(move |v| v / p.h_norm))
                .fold(0.0, f64::max);
            t.push(vec![k as f64, self.variation.v[i], self.variation.sum_a[i], ratio]).expect("fixed width");
        }
        t
    }

    /// Named pass/fail checks with the envelopes above.
    pub fn checks(&self, growth_target: f64) -> Vec<(&'static str, bool)> {
        vec![
            ("v_increasing", self.variation.increasing),
            ("v_lower_bound", self.variation.v.iter().zip(&self.variation.lower_bound).all(|(v, l)| v >= l)),
            ("v_growth", self.growth_factor >= growth_target),
            ("pairing_bounded", self.max_pairing_ratio <= PINNED_PAIRING),
            ("modes_ibp", self.modes.holds()),
            ("tg_bounded", self.tg.max_ratio <= PINNED_PAIRING),
            ("tg_vertical", self.tg.max_vertical <= self.tg.vertical_bound),
            ("change_of_variables", self.change_of_variables.iter().all(|r| r[3] <= 1e-6)),
        ]
    }
}

/// Grid step for the `sup|f|` estimate.
pub const SUP_STEP: f64 = 0.05;

pub fn contrast(s: &OscillatingGaussianSeries) -> Result<ContrastReport> {
    s.validate()?;
    if s.k_max < 5 {
        return Err(Error::InvalidParameter("the contrast needs K_max ≥ 5".into()));
    }
    let sup = sup_f(s, SUP_STEP)?;
    let variation = radial_variation_f(s, 3, s.k_max)?;
    let growth_factor = variation.v[variation.v.len() - 1] / variation.v[2];
    let family = test_family(&sup);
    let zs = dyadic_endpoints(3, s.k_max as u32);
    let pairings: Vec<PairingReport> = family.iter().map(|h| pairing_bound(s, h, &zs)).collect::<Result<_>>()?;
    let max_pairing_ratio = pairings.iter().map(|p| p.bound_constant).fold(0.0, f64::max);
    let modes = mode_check(s, &family, &zs)?;
    let tg = tg_sweep(s, &family, &zs, sup.sup.max(sup.sup_fine))?;
    let g = disk_symbol(s);
    let change_of_variables = (3..=max_disk_index(s).min(s.k_max))
        .map(|k| {
            let d = g.radial_variation(k)?;
            let v = variation.v[k - 3];
            Ok([k as f64, d, v, (d - v).abs() / v])
        })
        .collect::<Result<_>>()?;
    Ok(ContrastReport {
        series: *s,
        sup,
        variation,
        growth_factor,
        pairings,
        max_pairing_ratio,
        modes,
        tg,
        change_of_variables,
    })
}
