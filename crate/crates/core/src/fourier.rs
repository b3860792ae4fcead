//! Finitely supported Fourier data on the torus `λ𝕋 = ℝ/(2πλℤ)`.
//!
//! Frequencies are `k = j/λ` with `j ∈ ℤ`. A state is stored through the
//! integer index `j` and the amplitude `c_j = û(k)/√λ`, so that
//! `u(x) = λ⁻¹ Σ û(k) e^{ikx} = λ^{-1/2} Σ c_j e^{ijx/λ}` and
//! `‖u‖²_{L²(λ𝕋)} = 2π Σ|c_j|²`. The scaling `u ↦ ν^{-1/2}u(·/ν)` then leaves
//! every `c_j` untouched and only changes `λ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierState {
    lambda: f64,
    modes: BTreeMap<i64, Complex64>,
}

impl FourierState {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::invalid(format!("torus scale must be positive, got {lambda}")));
        }
        Ok(FourierState { lambda, modes: BTreeMap::new() })
    }

    /// Builds a state from `(j, û(j/λ))` pairs.
    pub fn from_hat(lambda: f64, hats: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut s = Self::new(lambda)?;
        for (j, v) in hats {
            s.set_hat(j, v);
        }
        Ok(s)
    }

    /// Builds a state from normalized amplitudes `c_j`.
    pub fn from_amplitudes(lambda: f64, amps: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let mut s = Self::new(lambda)?;
        for (j, c) in amps {
            if c != Complex64::new(0.0, 0.0) {
                s.modes.insert(j, c);
            }
        }
        Ok(s)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set_hat(&mut self, j: i64, value: Complex64) {
        let c = value / self.lambda.sqrt();
        if c == Complex64::new(0.0, 0.0) {
            self.modes.remove(&j);
        } else {
            self.modes.insert(j, c);
        }
    }

    /// `û(j/λ)`.
    pub fn hat(&self, j: i64) -> Complex64 {
        self.amplitude(j) * self.lambda.sqrt()
    }

    /// Normalized amplitude `c_j`.
    pub fn amplitude(&self, j: i64) -> Complex64 {
        self.modes.get(&j).copied().unwrap_or_default()
    }

    pub fn frequency(&self, j: i64) -> f64 {
        j as f64 / self.lambda
    }

    /// `(j, c_j)` in increasing `j`.
    pub fn amplitudes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.modes.iter().map(|(&j, &c)| (j, c))
    }

    /// `(j, û(j/λ))` in increasing `j`.
    pub fn hats(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let s = self.lambda.sqrt();
        self.modes.iter().map(move |(&j, &c)| (j, c * s))
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// Largest `|k|` carrying a nonzero amplitude, or 0.
    pub fn cutoff(&self) -> f64 {
        self.index_span().map_or(0.0, |(lo, hi)| lo.abs().max(hi.abs()) as f64 / self.lambda)
    }

    /// Smallest and largest `j` in the support.
    pub fn index_span(&self) -> Option<(i64, i64)> {
        Some((*self.modes.keys().next()?, *self.modes.keys().next_back()?))
    }

    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * PI * self.modes.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `‖u‖²_{Ḣˢ} = 2π Σ |k|^{2s} |c_j|²`.
    pub fn hdot_norm_sq(&self, s: f64) -> f64 {
        2.0 * PI
            * self
                .amplitudes()
                .filter(|&(j, _)| j != 0 || s == 0.0)
                .map(|(j, c)| self.frequency(j).abs().powf(2.0 * s) * c.norm_sqr())
                .sum::<f64>()
    }

    /// `‖u‖²_{H¹} = 2π Σ (1 + k²) |c_j|²`.
    pub fn h1_norm_sq(&self) -> f64 {
        2.0 * PI
            * self
                .amplitudes()
                .map(|(j, c)| (1.0 + self.frequency(j).powi(2)) * c.norm_sqr())
                .sum::<f64>()
    }

    /// Point value `u(x)`.
    pub fn eval(&self, x: f64) -> Complex64 {
        let y = x / self.lambda;
        let sum: Complex64 = self.amplitudes().map(|(j, c)| c * Complex64::cis(j as f64 * y)).sum();
        sum / self.lambda.sqrt()
    }

    /// The state of `conj(u)`: `c_j ↦ conj(c_{-j})`.
    pub fn conjugate(&self) -> Self {
        FourierState {
            lambda: self.lambda,
            modes: self.modes.iter().map(|(&j, c)| (-j, c.conj())).collect(),
        }
    }

    /// Coefficientwise map on `(k, û)`.
    pub fn map_hat(&self, mut f: impl FnMut(f64, Complex64) -> Complex64) -> Self {
        let mut out = FourierState { lambda: self.lambda, modes: BTreeMap::new() };
        for (j, h) in self.hats() {
            out.set_hat(j, f(self.frequency(j), h));
        }
        out
    }

    /// `v^ν(x) = ν^{-1/2} v(x/ν)` on the torus of scale `νλ`.
    pub fn rescale(&self, nu: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::invalid(format!("rescaling factor must be positive, got {nu}")));
        }
        Ok(FourierState { lambda: self.lambda * nu, modes: self.modes.clone() })
    }

    /// Free Schrödinger flow: `û(k) ↦ e^{-ik²t} û(k)`.
    pub fn evolve_linear(&self, t: f64) -> Self {
        let l2 = self.lambda * self.lambda;
        FourierState {
            lambda: self.lambda,
            modes: self
                .modes
                .iter()
                .map(|(&j, &c)| (j, c * Complex64::cis(-((j * j) as f64 / l2) * t)))
                .collect(),
        }
    }

    /// Complex Gaussian amplitudes `c_j` (unit variance) on every `j` in `range`.
    pub fn random_gaussian<R: Rng>(lambda: f64, range: std::ops::RangeInclusive<i64>, rng: &mut R) -> Result<Self> {
        let amps: Vec<(i64, Complex64)> = range
            .map(|j| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (j, Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2)
            })
            .collect();
        Self::from_amplitudes(lambda, amps)
    }
}

/// Exponent `σ(p₁, p₂) = 2/p₂ + 1/p₁ − 1/2` by which an `L^{p₁}_t L^{p₂}_x`
/// bound picks up powers of the scaling factor.
pub fn sigma_exponent(p1: f64, p2: f64) -> f64 {
    2.0 / p2 + 1.0 / p1 - 0.5
}
