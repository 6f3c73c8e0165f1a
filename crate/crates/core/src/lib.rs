//! Numerical laboratory for uniform approximation of Bloch functions by a
//! ∂̄-correction scheme, the integration operators `J_p` and `T_g` on `H^∞`,
//! and an explicit symbol with unbounded radial variation whose `T_g` is
//! bounded.
//!
//! The numerics, geometry and polynomial layers are generic over the scalar
//! type through [`Real`]; the experiment pipelines built on top of them run in
//! `f64`. Concrete aliases for the `f64` instantiation live at the crate root.

pub mod counterexample;
pub mod dbar;
pub mod error;
pub mod geometry;
pub mod numerics;
pub mod operator;
pub mod polyapprox;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

/// Complex `f64`.
pub type C64 = num_complex::Complex<f64>;
pub type Point = numerics::ComplexPoint<f64>;
pub type Path = numerics::Contour<f64>;
pub type Quadrature = numerics::QuadratureResult<f64>;
pub type Sector = geometry::SectorDomain<f64>;
pub type Strip = geometry::HalfStrip<f64>;
pub type Chain = geometry::ConformalChain<f64>;
pub type Psi = geometry::PsiBeta<f64>;
pub type Poly = polyapprox::ChebyshevPoly<f64>;
