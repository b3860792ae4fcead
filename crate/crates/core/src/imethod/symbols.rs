use serde::{Deserialize, Serialize};

use super::multiplier::MultiplierParams;
use super::resonance::{classify_resonance, in_upsilon6, ResonanceKind, Thresholds};
use super::tuple::FreqTuple;
use crate::error::{Error, Result};

/// Sign of the nonlinearity in `(i∂_t + Δ)u = ε|u|⁴u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NlsSign {
    #[default]
    Defocusing,
    Focusing,
}

impl NlsSign {
    pub fn eps(self) -> f64 {
        match self {
            NlsSign::Defocusing => 1.0,
            NlsSign::Focusing => -1.0,
        }
    }
}

/// Everything a symbol evaluation depends on besides the tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolContext {
    pub multiplier: MultiplierParams,
    pub sign: NlsSign,
    pub thresholds: Thresholds,
}

impl SymbolContext {
    pub fn new(multiplier: MultiplierParams, sign: NlsSign) -> Self {
        SymbolContext { multiplier, sign, thresholds: Thresholds::default() }
    }

    pub fn eps(&self) -> f64 {
        self.sign.eps()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolId {
    Sigma2,
    Sigma6,
    /// `M₆¹`, the part of `M₆` produced by the quadratic energy.
    M61,
    /// `M₆²`, produced by the sextic energy.
    M62,
    M6,
    M6Bar,
    M6Tilde,
    Sigma6Tilde,
    Quotient,
}

/// Every sextic quantity of one tuple, computed together.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SexticSymbols {
    pub sigma6: f64,
    pub m61: f64,
    pub m62: f64,
    pub m6bar: f64,
    pub m6tilde: f64,
    pub sigma6_tilde: f64,
    /// `λ²Ω₆`, exact.
    pub omega_scaled: i64,
    pub kind: Option<ResonanceKind>,
}

impl SexticSymbols {
    pub fn m6(&self) -> f64 {
        self.m61 + self.m62
    }
}

fn check_arity(t: &FreqTuple, n: usize) -> Result<()> {
    if t.len() != n {
        return Err(Error::invalid(format!("symbol needs {n} frequencies, got {}", t.len())));
    }
    if !t.on_gamma() {
        return Err(Error::invalid(format!("tuple {t} is not on the zero-sum hyperplane")));
    }
    Ok(())
}

/// `Σ(−1)^{j+1} m²(k_j)k_j²` with odd and even parts summed separately in
/// increasing order, and the sum of absolute terms.
fn weighted_alternating(t: &FreqTuple, p: &MultiplierParams) -> (f64, f64) {
    let mut odd = Vec::with_capacity(3);
    let mut even = Vec::with_capacity(3);
    for (i, _) in t.js.iter().enumerate() {
        let k = t.k(i);
        let m = p.m(k);
        let v = m * m * k * k;
        if i % 2 == 0 {
            odd.push(v);
        } else {
            even.push(v);
        }
    }
    odd.sort_by(f64::total_cmp);
    even.sort_by(f64::total_cmp);
    let so: f64 = odd.iter().sum();
    let se: f64 = even.iter().sum();
    (so - se, so + se)
}

fn sigma2(t: &FreqTuple, p: &MultiplierParams) -> f64 {
    let (k1, k2) = (t.k(0), t.k(1));
    -0.5 * p.m(k1) * k1 * p.m(k2) * k2
}

/// All sextic symbols of `t`.
///
/// `M₆¹ = (1/6)Σ±m²k²`, `M₆² = −ε σ₆ Ω₆`, `M̄₆ = M₆¹` on resonant tuples of
/// `Υ₆` and 0 elsewhere, and `σ̃₆ = −ε M̃₆/Ω₆`. On resonant tuples `σ̃₆ = σ₆`
/// identically. Where `Ω₆ = 0` and `M̃₆` vanishes `σ̃₆` is set to 0; a nonzero
/// `M̃₆` there is reported as a resonance gap.
pub fn sextic_symbols(t: &FreqTuple, ctx: &SymbolContext) -> Result<SexticSymbols> {
    check_arity(t, 6)?;
    let p = &ctx.multiplier;
    let eps = ctx.eps();
    let prod_m: f64 = (0..6).map(|i| p.m(t.k(i))).product();
    let sigma6 = eps * prod_m / 6.0;
    let (a_s, a_abs) = weighted_alternating(t, p);
    let omega_scaled = t.omega_scaled();
    let omega = omega_scaled as f64 / (t.lambda * t.lambda) as f64;
    let m61 = a_s / 6.0;
    let m62 = -prod_m * omega / 6.0;
    let kind = if in_upsilon6(t, p, &ctx.thresholds) {
        Some(classify_resonance(t, p, &ctx.thresholds)?.kind)
    } else {
        None
    };
    let resonant = kind.is_some_and(ResonanceKind::is_resonant);
    let m6bar = if resonant { m61 } else { 0.0 };
    let m6tilde = if resonant { m62 } else { m61 + m62 };
    let sigma6_tilde = if resonant {
        sigma6
    } else if omega_scaled != 0 {
        eps * (prod_m - a_s / omega) / 6.0
    } else if a_s.abs() <= 1e-12 * a_abs {
        0.0
    } else {
        return Err(Error::ResonanceGap { tuple: t.to_string(), numerator: m6tilde });
    };
    Ok(SexticSymbols { sigma6, m61, m62, m6bar, m6tilde, sigma6_tilde, omega_scaled, kind })
}

/// Evaluates one symbol on a tuple of the matching arity.
pub fn evaluate_symbol(id: SymbolId, t: &FreqTuple, ctx: &SymbolContext) -> Result<f64> {
    if id == SymbolId::Sigma2 {
        check_arity(t, 2)?;
        return Ok(sigma2(t, &ctx.multiplier));
    }
    if id == SymbolId::Quotient {
        check_arity(t, 6)?;
        if t.omega_scaled() == 0 {
            return Err(Error::invalid(format!("quotient undefined: tuple {t} has zero phase")));
        }
        let (a_s, _) = weighted_alternating(t, &ctx.multiplier);
        return Ok(a_s / (t.omega_scaled() as f64 / (t.lambda * t.lambda) as f64));
    }
    let s = sextic_symbols(t, ctx)?;
    Ok(match id {
        SymbolId::Sigma6 => s.sigma6,
        SymbolId::M61 => s.m61,
        SymbolId::M62 => s.m62,
        SymbolId::M6 => s.m6(),
        SymbolId::M6Bar => s.m6bar,
        SymbolId::M6Tilde => s.m6tilde,
        SymbolId::Sigma6Tilde => s.sigma6_tilde,
        SymbolId::Sigma2 | SymbolId::Quotient => unreachable!(),
    })
}
