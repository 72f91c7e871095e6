use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dielectric function is singular at omega = {omega} eV")]
    Singular { omega: f64 },

    #[error("quadrature did not converge: {0}")]
    Convergence(String),

    #[error("model breakdown: {0}")]
    Breakdown(String),

    #[error("spin-wave instability: {0}")]
    Instability(String),

    #[error("{modes} modes exceed the multinomial oracle limit of {limit}; use the resummed exchange instead")]
    TooManyModes { modes: usize, limit: usize },

    #[error("root bracketing failed on [{lo}, {hi}] nm^-1: {reason}")]
    Bracketing { lo: f64, hi: f64, reason: String },
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
