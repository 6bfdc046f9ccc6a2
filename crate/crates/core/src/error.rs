use thiserror::Error;

/// Errors raised by the computational modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown energy unit `{0}`")]
    UnknownUnit(String),

    #[error("unknown scenario `{0}` (expected one of atom_1eV, gram_avogadro, kilogram)")]
    UnknownScenario(String),

    #[error("Bose occupation diverges at omega = 0 for T > 0")]
    ZeroFrequencyDivergence,

    #[error("quadrature did not reach tolerance {tolerance:e}: estimate {value:e}, achieved error {achieved:e}")]
    QuadratureNotConverged {
        value: f64,
        achieved: f64,
        tolerance: f64,
    },

    #[error("thermal series not converged after {terms} terms: partial sum {partial:e}, remaining bound {bound:e}")]
    SeriesNotConverged {
        terms: usize,
        partial: f64,
        bound: f64,
    },

    #[error("step size underflow at t = {t:e} s (h = {step:e} s)")]
    StepSizeUnderflow { t: f64, step: f64 },

    #[error("the finite-time dephasing exponent of an Ohmic bath is UV divergent without an exponential cutoff")]
    CutoffRequired,

    #[error("density matrix invalid: {0}")]
    InvalidDensityMatrix(String),

    #[error("field grid does not cover the ball: {0}")]
    GridCoverage(String),

    #[error("closed-form rest energy {closed:e} disagrees with quadrature {quadrature:e}")]
    EnergyMismatch { closed: f64, quadrature: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn ensure_finite(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value < 0.0 {
        return Err(invalid(name, format!("must be >= 0, got {value}")));
    }
    Ok(())
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value <= 0.0 {
        return Err(invalid(name, format!("must be > 0, got {value}")));
    }
    Ok(())
}
