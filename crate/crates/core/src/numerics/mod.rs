//! Complex points, piecewise-smooth contours, adaptive contour quadrature,
//! finite-difference Wirtinger derivatives and bump-localized real integrals.

mod contour;
mod gauss;
mod tail;
mod wirtinger;

pub use contour::{ComplexPoint, Contour, Segment};
pub use gauss::{gauss_legendre, integrate_contour, integrate_segment, QuadratureResult, PANEL_ORDER};
pub use tail::{gaussian_tail_mass, integrate_bumps, integrate_real_tail, DEFAULT_TAIL_WINDOW};
pub use wirtinger::{gradient_norm, wirtinger, wirtinger_in, DEFAULT_RELATIVE_STEP};
