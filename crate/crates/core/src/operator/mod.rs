//! `J_p` and `T_g`, radial variation, the diameter bound and the witness
//! showing that `J_p` is unbounded when the interior diameter is infinite.

mod integral;
mod spiral;
mod variation;
mod witness;

pub use integral::{apply_jp, apply_tg, jp_ratio_sweep, upper_bound_via_diameter, JpSweep, DIAMETER_SAMPLES};
pub use spiral::SpiralMap;
pub use variation::{radial_variation, GrowthFit, GrowthModel, VariationReport};
pub use witness::{
    make_spiral_map, witness_from_run, witness_lower_bound, CollarProbe, UnivalentMapSpec, WitnessFunction, WitnessReport, WitnessRow,
};
