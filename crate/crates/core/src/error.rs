use thiserror::Error;

use crate::numerics::QuadratureResult;

/// Errors raised across the laboratory.
///
/// Messages carry the exact wording the CLI reports.
#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("integrand singular on path at t = {t}")]
    SingularIntegrand { t: f64 },

    #[error("tolerance not met: best estimate {best_re} + {best_im}i, error estimate {error}")]
    ToleranceNotMet {
        best_re: f64,
        best_im: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("stencil out of domain at ({re}, {im})")]
    StencilOutOfDomain { re: f64, im: f64 },

    #[error("log singularity")]
    LogSingularity,

    #[error("automorphism fit failed: {0}")]
    AutomorphismFit(String),

    #[error("endpoint not in domain: ({re}, {im})")]
    EndpointNotInDomain { re: f64, im: f64 },

    #[error("no path")]
    NoPath,

    #[error("resolution insufficient: cell {cell} but slit gap {gap}")]
    ResolutionInsufficient { cell: f64, gap: f64 },

    #[error("polynomial not normalized: {0}")]
    PolynomialNotNormalized(String),

    #[error("b too small: w not bounded away from zero (|w| = {floor} at ({re}, {im}))")]
    PartitionFloor { floor: f64, re: f64, im: f64 },

    #[error("dbar correction failed: residual {residual} at ({re}, {im})")]
    DbarCorrectionFailed { residual: f64, re: f64, im: f64 },

    #[error("witness phase error too large; increase m (achieved {achieved}, need {required})")]
    WitnessPhase { achieved: f64, required: f64 },

    #[error("map not certified univalent at this c: {0}")]
    NotUnivalent(String),

    #[error("outside domain: ({re}, {im})")]
    OutsideDomain { re: f64, im: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn tolerance_not_met<T: crate::Real>(best: &QuadratureResult<T>) -> Self {
        Error::ToleranceNotMet {
            best_re: crate::scalar::to_f64(best.value.re),
            best_im: crate::scalar::to_f64(best.value.im),
            error: crate::scalar::to_f64(best.abs_error_estimate),
            evaluations: best.evaluations,
        }
    }

    /// Best available estimate carried by a [`Error::ToleranceNotMet`].
    pub fn best_estimate(&self) -> Option<(f64, f64, f64)> {
        match *self {
            Error::ToleranceNotMet {
                best_re,
                best_im,
                error,
                ..
            } => Some((best_re, best_im, error)),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
