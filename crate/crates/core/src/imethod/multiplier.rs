use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierState;
use crate::lattice::is_dyadic;

/// Rule used above `N`. Only one is provided: `(N/r)^{1−s}`, which already
/// agrees with `N^{1−s} r^{s−1}` beyond `2N` and is continuous at `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Interp {
    #[default]
    PowerLaw,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiplierParams {
    pub n: u64,
    pub s: f64,
    #[serde(default)]
    pub interp: Interp,
}

impl MultiplierParams {
    pub fn new(n: u64, s: f64) -> Result<Self> {
        if !is_dyadic(n) {
            return Err(Error::invalid(format!("N = {n} is not a power of two")));
        }
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::invalid(format!("s = {s} must lie in (0, 1)")));
        }
        Ok(MultiplierParams { n, s, interp: Interp::PowerLaw })
    }

    pub fn big_n(&self) -> f64 {
        self.n as f64
    }

    /// `m(r)`: 1 up to `N`, then `(N/r)^{1−s}`.
    pub fn m(&self, r: f64) -> f64 {
        let r = r.abs();
        let n = self.big_n();
        if r <= n {
            1.0
        } else {
            match self.interp {
                Interp::PowerLaw => (n / r).powf(1.0 - self.s),
            }
        }
    }
}

/// `Iu`: multiplies each coefficient by `m(|k|)`.
pub fn apply_i(state: &FourierState, p: &MultiplierParams) -> FourierState {
    state.map_hat(|k, v| v * p.m(k))
}
