use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("point is not interior (rho = {rho:e})")]
    NotInterior { rho: f64 },

    #[error("point is not inside the unit ball (|xi| = {norm})")]
    OutsideBall { norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("non-finite integrand value at node {node}")]
    NonFiniteIntegrand { node: String },

    #[error("unknown symbol id `{0}`")]
    UnknownSymbol(String),

    #[error("invalid symbol parameter: {0}")]
    InvalidParameter(String),

    #[error("symbol `{0}` is not holomorphic")]
    NotHolomorphic(String),

    #[error("parameter domain violation: {0}")]
    ParameterDomain(String),

    #[error("negative radicand {radicand:e} exceeds 3 standard errors ({std_error:e})")]
    QuadratureInconsistency { radicand: f64, std_error: f64 },

    #[error("power iteration did not converge (last residual {residual:e})")]
    NonConvergent { residual: f64 },

    #[error("automorphism kind `{0}` has no constant Jacobian")]
    NonConstantJacobian(String),

    #[error("basis certification failed: {0}")]
    Certification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
