use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, ZetaError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZetaError {
    /// `1 - p^-s` vanished to within the singularity tolerance: `s` is in the
    /// exclusion set for this prime.
    #[error("singular factor: |1 - {prime}^-s| = {gap:e} < {tol:e} at s = {s}")]
    Singular {
        prime: u64,
        s: Complex64,
        gap: f64,
        tol: f64,
    },

    #[error("overflow evaluating {base}^-s at s = {s}")]
    Overflow { base: u64, s: Complex64 },

    #[error("series does not converge: Re(s) = {sigma} must exceed 1")]
    NonConvergent { sigma: f64 },

    #[error("{what} needs about {needed:.3e} but the budget allows {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: f64,
        budget: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("prime cache: {0}")]
    Cache(String),
}

impl ZetaError {
    /// True for rejections that come from the mathematics (as opposed to bad
    /// input or I/O).
    pub fn is_computational(&self) -> bool {
        matches!(
            self,
            ZetaError::Singular { .. }
                | ZetaError::Overflow { .. }
                | ZetaError::NonConvergent { .. }
                | ZetaError::BudgetExceeded { .. }
        )
    }
}
