use thiserror::Error;

/// Failures raised by the numerical models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("time {t} s lies before the fill time {t_fill} s")]
    BeforeFill { t: f64, t_fill: f64 },

    #[error("tabulated pulse has {samples_per_period:.2} samples per carrier period (need at least {required})")]
    QuadratureResolution { samples_per_period: f64, required: f64 },

    #[error("pulse family cannot reach the target transform (|unit member| = {magnitude:e})")]
    SingularFamily { magnitude: f64 },

    #[error("adaptive step size underflow at t = {t} s (h = {h:e} s)")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("output grid step {dt:e} s exceeds {max_dt:e} s")]
    GridTooCoarse { dt: f64, max_dt: f64 },

    #[error("zero-DC pulse has net charge {charge:e} C (tolerance {tolerance:e} C)")]
    NonZeroDc { charge: f64, tolerance: f64 },

    #[error("tridiagonal eigen-solver did not converge for eigenvalue {index}")]
    EigenConvergence { index: usize },

    #[error("mode {requested} requested but only {available} modes are available")]
    ModeTruncation { requested: usize, available: usize },

    #[error("resonator frequency {omega_r:e} rad/s is too close to the mode band edge {omega_top:e} rad/s")]
    BandEdge { omega_r: f64, omega_top: f64 },

    #[error("frequency grid spacing {delta:e} exceeds W/10 = {limit:e}")]
    FrequencyGridTooCoarse { delta: f64, limit: f64 },

    #[error("z = {z:e} is below the carrier-less limit; photon count diverges")]
    DivergentLimit { z: f64 },
}

pub type Result<T> = std::result::Result<T, ModelError>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter { field, reason: reason.into() }
}

pub(crate) fn require_positive(field: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and positive, got {value}")))
    }
}
