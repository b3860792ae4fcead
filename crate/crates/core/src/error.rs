use thiserror::Error;

/// Errors raised by the laboratory kernels.
///
/// Validation failures and cap refusals are kept apart so that front ends can
/// map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("cap exceeded: {what} = {value} > {cap}")]
    CapExceeded { what: &'static str, value: u64, cap: u64 },

    #[error("no calibration reproduces every cell; worst cell {cell}: 3d count {lhs}, 2d count {rhs}")]
    NoCalibration { cell: String, lhs: u64, rhs: u64 },

    #[error("resonance gap: non-resonant tuple {tuple} has zero phase with nonzero numerator {numerator}")]
    ResonanceGap { tuple: String, numerator: f64 },

    #[error("energy forms disagree: symbol form {symbol}, norm form {norm}")]
    EnergyMismatch { symbol: f64, norm: f64 },

    #[error("integrator did not stabilise: mass drift {drift:e} after {halvings} step halvings (dt = {dt:e})")]
    Integrator { drift: f64, halvings: u32, dt: f64 },

    #[error("imaginary residue {residue:e} exceeds tolerance for a real-valued functional (value {value:e})")]
    ImaginaryResidue { residue: f64, value: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn cap(what: &'static str, value: impl TryInto<u64>, cap: impl TryInto<u64>) -> Self {
        Error::CapExceeded {
            what,
            value: value.try_into().unwrap_or(u64::MAX),
            cap: cap.try_into().unwrap_or(u64::MAX),
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self, Error::CapExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
