use num_complex::Complex64;
use thiserror::Error;

use crate::atomic::ConditioningReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value outside its physical or structural domain.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("probe Rabi frequency is {ratio:.3}·γ2, above the weak-probe limit {limit}·γ2")]
    StrongProbe { ratio: f64, limit: f64 },

    #[error("steady-state solve failed: {report}")]
    SingularSteadyState { report: ConditioningReport },

    #[error("rational susceptibility denominator vanishes at Ω = {omega:e} rad/s")]
    ZeroDenominator { omega: f64 },

    #[error(
        "finite-difference slope did not converge: h-estimate {coarse}, h/2-estimate {fine}, \
         extrapolated {extrapolated}"
    )]
    SlopeNotConverged {
        coarse: Complex64,
        fine: Complex64,
        extrapolated: Complex64,
    },

    #[error("user geometry: {0}")]
    Geometry(String),

    #[error("combiner: {reason} (condition number {condition_number:e})")]
    Combiner {
        reason: &'static str,
        condition_number: f64,
    },

    #[error("dimension: {0}")]
    Dimension(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the user's inputs rather than by the run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::StrongProbe { .. }
                | Error::Geometry(_)
                | Error::Config(_)
        )
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

pub(crate) fn ensure_nonnegative(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be nonnegative and finite, got {value}"),
        ))
    }
}
