//! The oscillating Gaussian series on `Ω = log D₁`: divergent radial
//! variation with uniformly bounded pairings, and the induced disk symbol.

mod contrast;
mod pairing;
mod series;
mod symbol;

pub use contrast::{contrast, ContrastReport, PINNED_PAIRING};
pub use pairing::{
    dyadic_endpoints, mode_check, mode_integral, pairing_bound, pairing_integral, test_family, ModeReport,
    PairingReport, TestFunction, TestKind, PAIRING_TOL,
};
pub use series::{
    a, bump_variation, cauchy_distance, check_series_conditions, in_omega, lambda, radial_variation_f, sup_f, zeta,
    OscillatingGaussianSeries, RadialVariation, SeriesConditions, SupEstimate, DEFAULT_K_MAX, FIRST_INDEX,
    VARIATION_TOL,
};
pub use symbol::{disk_symbol, max_disk_index, two_leg_pairing, tg_sweep, DiskSymbol, TgSweep, TwoLeg, SWEEP_HEIGHTS};
