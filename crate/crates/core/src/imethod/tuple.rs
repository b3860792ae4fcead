use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Rational;

/// Frequencies `k_i = j_i/λ` of an `n`-linear interaction.
///
/// Even positions belong to conjugated factors; their frequencies are stored
/// negated, so membership in `Γ_n` is the plain condition `Σk_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FreqTuple {
    pub js: Vec<i64>,
    pub lambda: i64,
}

impl FreqTuple {
    pub fn new(js: Vec<i64>, lambda: i64) -> Result<Self> {
        if lambda < 1 {
            return Err(Error::invalid(format!("lambda must be a positive integer, got {lambda}")));
        }
        if js.is_empty() || js.len() % 2 == 1 {
            return Err(Error::invalid(format!("tuple length {} must be even and positive", js.len())));
        }
        Ok(FreqTuple { js, lambda })
    }

    /// Integer frequencies at `λ = 1`.
    pub fn ints(js: &[i64]) -> Result<Self> {
        Self::new(js.to_vec(), 1)
    }

    pub fn len(&self) -> usize {
        self.js.len()
    }

    pub fn is_empty(&self) -> bool {
        self.js.is_empty()
    }

    pub fn k(&self, i: usize) -> f64 {
        self.js[i] as f64 / self.lambda as f64
    }

    pub fn k_rat(&self, i: usize) -> Rational {
        Rational::new(self.js[i], self.lambda)
    }

    pub fn on_gamma(&self) -> bool {
        self.js.iter().sum::<i64>() == 0
    }

    /// `λ² Ω_n`, an integer.
    pub fn omega_scaled(&self) -> i64 {
        self.js.iter().enumerate().map(|(i, &j)| if i % 2 == 0 { j * j } else { -j * j }).sum()
    }
}

impl fmt::Display for FreqTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.js.iter().map(|j| j.to_string()).collect();
        if self.lambda == 1 {
            write!(f, "({})", parts.join(","))
        } else {
            write!(f, "({})/{}", parts.join(","), self.lambda)
        }
    }
}

/// `Ω_n = Σ_i (−1)^{i+1} k_i²` with positions counted from 1.
pub fn omega_n(t: &FreqTuple) -> Rational {
    Rational::new(t.omega_scaled(), t.lambda * t.lambda)
}

/// One entry of a decreasing rearrangement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Starred {
    pub index: usize,
    pub value: f64,
    pub magnitude: f64,
}

/// Magnitudes sorted nonincreasing; ties keep their original order.
pub fn rearrange_decreasing(values: &[f64]) -> Result<Vec<Starred>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot rearrange an empty list"));
    }
    let mut out: Vec<Starred> = values
        .iter()
        .enumerate()
        .map(|(index, &value)| Starred { index, value, magnitude: value.abs() })
        .collect();
    out.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    Ok(out)
}

/// Smallest power of two at least `x`, and at least 1.
pub fn dyadic_class(x: f64) -> f64 {
    let x = x.abs();
    let mut d = 1.0;
    while d < x {
        d *= 2.0;
    }
    d
}
