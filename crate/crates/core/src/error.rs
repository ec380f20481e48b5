use thiserror::Error;

/// Errors raised by construction, evaluation, quadrature and I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// A function returned NaN or infinity on a stencil or quadrature node.
    #[error("non-finite value while evaluating {what} at z = {re} + {im}i")]
    Domain { what: &'static str, re: f64, im: f64 },

    /// `|Im(k z + h z̄)|` exceeded the double-precision exponent budget.
    #[error("exponent imaginary part {exponent_im:.3e} exceeds overflow guard {limit}")]
    Overflow { exponent_im: f64, limit: f64 },

    #[error("adaptive quadrature did not converge: estimate {estimate_re:.6e}{estimate_im:+.6e}i, error bound {error_bound:.3e}")]
    Quadrature {
        estimate_re: f64,
        estimate_im: f64,
        error_bound: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid integration path: {0}")]
    InvalidPath(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Hard numeric failures, as opposed to caller mistakes.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::Overflow { .. } | Error::Quadrature { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
