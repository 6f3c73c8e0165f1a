//! Sectors, half-strips, the conformal changes of variable between them and
//! the disk, and grid-based geodesic distances for slit domains.

mod conformal;
mod domains;
mod grid;

pub use conformal::{build_psi_beta, ConformalChain, InjectivityReport, PsiBeta, Stage};
pub use domains::{sector_to_strip, strip_to_sector, HalfStrip, SectorDomain};
pub use grid::{
    comb_default_resolution, geodesic_distance, in_log_cos, in_spiral_image, interior_diameter, make_comb_domain,
    make_log_cos_domain,
    DiameterEstimate, DiscretizedDomain, DomainDescriptor, Shape, Slit, METRICATION_FACTOR,
};
