use thiserror::Error;

/// Errors raised by state construction, channel models, the estimator and
/// the imaging pipeline.
///
/// Every message starts with the variant name so that callers reporting
/// failures to users (the CLI, for instance) name the failure class.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidParameter: {name} = {value} ({reason})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("InvalidState: {0}")]
    InvalidState(String),

    #[error("NotXForm: entry outside the main and anti-diagonal has magnitude {0:e}")]
    NotXForm(f64),

    #[error("DegenerateResource: resource has no weight in the single-excitation subspace, no coincidences are possible")]
    DegenerateResource,

    #[error("ZeroConcurrence: resource concurrence is {0}, visibility amplitude is unrecoverable")]
    ZeroConcurrence(f64),

    #[error("DegeneratePhases: |sin(w2 - w1)| = {0:e} is below 1e-6")]
    DegeneratePhases(f64),

    #[error("ZeroTrials: at least one postselected trial is required")]
    ZeroTrials,

    #[error("ZeroFlux: sky model has no positive flux")]
    ZeroFlux,

    #[error("DegenerateGrid: {0}")]
    DegenerateGrid(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be a probability in [0, 1]",
        })
    }
}

pub(crate) fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and positive",
        })
    }
}
