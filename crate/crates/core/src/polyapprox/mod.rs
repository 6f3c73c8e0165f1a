//! Chebyshev series, Jackson-kernel approximation of Lipschitz functions and
//! growth bounds off the interval.

mod chebyshev;
mod jackson;

pub use chebyshev::{cheb_eval, growth_bound_check, ChebyshevPoly, GrowthCheck, DERIVATIVE_GROWTH_BASE, GROWTH_BASE};
pub use jackson::{
    degree_for_lipschitz, jackson_damping, jackson_fit, jackson_fit_complex, jackson_fit_with, ComplexJacksonFit, sup_error, JacksonFit, LipschitzWitness,
    DEFAULT_ERROR_SAMPLES,
};
