// Copyright 2026 PLME Lab Contributors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("outside domain: {0}")]
    Domain(String),

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("quadrature did not converge: estimated error {estimate:.3e} > tolerance {tolerance:.3e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("series did not converge: {0}")]
    NonConvergence(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("matrix is singular or ill-conditioned (condition {condition:.3e})")]
    Singular { condition: f64 },

    #[error("superoperator basis mismatch")]
    BasisMismatch,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error("configuration error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NonFinite(_)
                | Error::Quadrature { .. }
                | Error::NonConvergence(_)
                | Error::StepUnderflow { .. }
                | Error::Singular { .. }
        )
    }
}
