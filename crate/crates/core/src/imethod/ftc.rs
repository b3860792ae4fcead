//! Almost-conservation bookkeeping for `E¹_I` along Galerkin trajectories.
//!
//! With `σ̃₆Ω₆ = −εM̃₆` the flow satisfies
//! `d/dt (E¹_I − Λ₆(σ̃₆)) = iε (Λ₆(M̄₆) + Λ₁₀(M₁₀))`,
//! `M₁₀ = Σ_j (−1)^j X_j(σ₆ − σ̃₆)`. Both sides are evaluated on the
//! truncation set, where the elongated slot carries the projected quintic term.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::galerkin::{quintic_projected, Trajectory};
use super::lambda::lambda_n;
use super::symbols::{evaluate_symbol, sextic_symbols, SexticSymbols, SymbolContext, SymbolId};
use super::tuple::FreqTuple;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Sextic tuples of a truncation set with their symbols.
///
/// Tuple entries index `modes`; odd slots use `j = modes[a]`, even slots
/// `j = −modes[a]`.
#[derive(Debug, Clone)]
pub struct SexticTable {
    pub lambda: i64,
    pub modes: Vec<i64>,
    pub sigma2: Vec<f64>,
    pub tuples: Vec<([usize; 6], SexticSymbols)>,
}

impl SexticTable {
    pub fn build(modes: &[i64], lambda: i64, ctx: &SymbolContext, cap: u64) -> Result<Self> {
        let n = modes.len() as u64;
        let work = n.saturating_pow(5);
        if work > cap {
            return Err(Error::cap("sextic table size", work, cap));
        }
        let index: HashMap<i64, usize> = modes.iter().enumerate().map(|(i, &j)| (j, i)).collect();
        let sigma2 = modes
            .iter()
            .map(|&j| evaluate_symbol(SymbolId::Sigma2, &FreqTuple { js: vec![j, -j], lambda }, ctx))
            .collect::<Result<Vec<_>>>()?;
        let m = modes.len();
        let mut tuples = Vec::new();
        for a in 0..m.pow(5) {
            let mut ix = [0usize; 6];
            let mut r = a;
            for slot in ix.iter_mut().take(5) {
                *slot = r % m;
                r /= m;
            }
            let s = modes[ix[0]] - modes[ix[1]] + modes[ix[2]] - modes[ix[3]] + modes[ix[4]];
            let Some(&last) = index.get(&s) else { continue };
            ix[5] = last;
            let js: Vec<i64> = ix.iter().enumerate().map(|(p, &i)| if p % 2 == 0 { modes[i] } else { -modes[i] }).collect();
            tuples.push((ix, sextic_symbols(&FreqTuple { js, lambda }, ctx)?));
        }
        Ok(SexticTable { lambda, modes: modes.to_vec(), sigma2, tuples })
    }

    fn sextic_norm(&self) -> f64 {
        2.0 * PI / (self.lambda * self.lambda) as f64
    }

    fn coef(c: &[Complex64], slot: usize, i: usize) -> Complex64 {
        if slot.is_multiple_of(2) {
            c[i]
        } else {
            c[i].conj()
        }
    }

    /// `Λ₆(M)` for a symbol picked out of each row.
    pub fn lambda6(&self, c: &[Complex64], pick: impl Fn(&SexticSymbols) -> f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ix, s) in &self.tuples {
            let w = pick(s);
            if w == 0.0 {
                continue;
            }
            let prod: Complex64 = (0..6).map(|p| Self::coef(c, p, ix[p])).product();
            acc += prod * w;
        }
        acc * self.sextic_norm()
    }

    /// `Λ₁₀(Σ_j (−1)^j X_j M)` with the five merged slots replaced by the projected quintic term.
    pub fn lambda10_elongated(&self, c: &[Complex64], f: &[Complex64], pick: impl Fn(&SexticSymbols) -> f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ix, s) in &self.tuples {
            let w = pick(s);
            if w == 0.0 {
                continue;
            }
            let coefs: [Complex64; 6] = std::array::from_fn(|p| Self::coef(c, p, ix[p]));
            let mut inner = Complex64::new(0.0, 0.0);
            for (j, &i) in ix.iter().enumerate() {
                let fj = Self::coef(f, j, i);
                let rest: Complex64 = (0..6).filter(|&p| p != j).map(|p| coefs[p]).product();
                // (−1)^j with 1-based slots: unconjugated slots get −1.
                let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
                inner += rest * fj * sign;
            }
            acc += inner * w;
        }
        acc * self.sextic_norm()
    }

    /// `E¹_I = Λ₂(σ₂) + Λ₆(σ₆)` on amplitudes `c`.
    pub fn energy(&self, c: &[Complex64]) -> f64 {
        let quad: f64 = self.sigma2.iter().zip(c).map(|(s, z)| s * z.norm_sqr()).sum::<f64>() * 2.0 * PI;
        quad + self.lambda6(c, |s| s.sigma6).re
    }

    pub fn rates(&self, c: &[Complex64], eps: f64) -> Rates {
        let f = quintic_projected(&self.modes, c, self.lambda as f64);
        let ie = I * eps;
        let lambda2_omega = (self.lambda * self.lambda) as f64;
        let energy = ie * (self.lambda6(c, |s| s.m6()) + self.lambda10_elongated(c, &f, |s| s.sigma6));
        let tilde = -I * self.lambda6(c, |s| s.sigma6_tilde * s.omega_scaled as f64 / lambda2_omega)
            + ie * self.lambda10_elongated(c, &f, |s| s.sigma6_tilde);
        let integrand =
            ie * (self.lambda6(c, |s| s.m6bar) + self.lambda10_elongated(c, &f, |s| s.sigma6 - s.sigma6_tilde));
        Rates { energy: energy.re, tilde: tilde.re, integrand: integrand.re, imaginary: energy.im.abs().max(tilde.im.abs()).max(integrand.im.abs()) }
    }
}

/// Time derivatives predicted by the differentiation rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    /// `dE¹_I/dt`.
    pub energy: f64,
    /// `d/dt Λ₆(σ̃₆)`.
    pub tilde: f64,
    /// `iε(Λ₆(M̄₆) + Λ₁₀(M₁₀))`.
    pub integrand: f64,
    /// Largest discarded imaginary part.
    pub imaginary: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtcTerms {
    pub delta_energy: f64,
    pub delta_tilde: f64,
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FtcReport {
    /// Residual divided by the largest of the three terms (absolute if all vanish).
    pub residual: f64,
    pub absolute: f64,
    pub terms: FtcTerms,
    pub dt: f64,
    /// Pointwise `E¹_I` at every sample.
    pub energy: Vec<f64>,
}

/// Composite Simpson rule on an even number of uniform intervals.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n == 0 || (n - 1) % 2 == 1 {
        return Err(Error::invalid(format!("Simpson needs an even number of intervals, got {}", n.saturating_sub(1))));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}

/// `E¹_I(T) − E¹_I(0) − [Λ₆(σ̃₆)]₀ᵀ − ∫₀ᵀ iε(Λ₆(M̄₆) + Λ₁₀(M₁₀))`.
pub fn ftc_residual(traj: &Trajectory, ctx: &SymbolContext, cap: u64) -> Result<FtcReport> {
    if traj.is_empty() {
        return Err(Error::invalid("empty trajectory"));
    }
    if traj.lambda.fract() != 0.0 {
        return Err(Error::invalid("trajectory scale must be an integer"));
    }
    let table = SexticTable::build(&traj.modes, traj.lambda as i64, ctx, cap)?;
    let eps = ctx.eps();
    let mut energy = Vec::with_capacity(traj.len());
    let mut tilde = Vec::with_capacity(traj.len());
    let mut integrand = Vec::with_capacity(traj.len());
    for c in &traj.coefs {
        energy.push(table.energy(c));
        tilde.push(table.lambda6(c, |s| s.sigma6_tilde).re);
        integrand.push(table.rates(c, eps).integrand);
    }
    let last = traj.len() - 1;
    let terms = FtcTerms {
        delta_energy: energy[last] - energy[0],
        delta_tilde: tilde[last] - tilde[0],
        integral: simpson(&integrand, traj.dt)?,
    };
    let absolute = terms.delta_energy - terms.delta_tilde - terms.integral;
    let scale = terms.delta_energy.abs().max(terms.delta_tilde.abs()).max(terms.integral.abs());
    let residual = if scale > 0.0 { absolute.abs() / scale } else { absolute.abs() };
    Ok(FtcReport { residual, absolute, terms, dt: traj.dt, energy })
}

/// Largest relative mismatch between centred differences of `E¹_I` and
/// `Λ₆(σ̃₆)` along a trajectory and the predicted rates, relative to the
/// largest predicted rate.
pub fn derivative_check(traj: &Trajectory, ctx: &SymbolContext, cap: u64) -> Result<f64> {
    if traj.len() < 3 {
        return Err(Error::invalid("need at least three samples"));
    }
    let table = SexticTable::build(&traj.modes, traj.lambda as i64, ctx, cap)?;
    let h = traj.dt;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = f64::MIN_POSITIVE;
    for i in 1..traj.len() - 1 {
        let r = table.rates(&traj.coefs[i], ctx.eps());
        let de = (table.energy(&traj.coefs[i + 1]) - table.energy(&traj.coefs[i - 1])) / (2.0 * h);
        let ds = (table.lambda6(&traj.coefs[i + 1], |s| s.sigma6_tilde).re
            - table.lambda6(&traj.coefs[i - 1], |s| s.sigma6_tilde).re)
            / (2.0 * h);
        scale = scale.max(r.energy.abs()).max(r.tilde.abs());
        worst = worst.max((de - r.energy).abs()).max((ds - r.tilde).abs());
    }
    Ok(worst / scale)
}

/// `Λ₁₀(X_j M)` by direct enumeration of ten slots, keeping only tuples whose
/// merged frequency lies in the truncation set. `j` is 1-based.
pub fn elongation_naive<F>(
    symbol: F,
    j: usize,
    u: &crate::fourier::FourierState,
    cap: u64,
) -> Result<Complex64>
where
    F: Fn(&FreqTuple) -> Result<f64> + Sync,
{
    if !(1..=6).contains(&j) {
        return Err(Error::invalid(format!("elongation slot {j} out of range")));
    }
    let support: std::collections::HashSet<i64> = u.amplitudes().map(|(k, _)| k).collect();
    let states = vec![u; 10];
    let (v, _) = lambda_n(
        |t| {
            let merged: i64 = t.js[j - 1..j + 4].iter().sum();
            let inside = if j % 2 == 1 { support.contains(&merged) } else { support.contains(&-merged) };
            if !inside {
                return Ok(0.0);
            }
            let mut js = t.js[..j - 1].to_vec();
            js.push(merged);
            js.extend_from_slice(&t.js[j + 4..]);
            symbol(&FreqTuple { js, lambda: t.lambda })
        },
        &states,
        cap,
    )?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::FourierState;
    use crate::imethod::galerkin::{integrate_galerkin, GalerkinOptions};
    use crate::imethod::multiplier::MultiplierParams;
    use crate::imethod::symbols::NlsSign;

    fn ctx() -> SymbolContext {
        SymbolContext::new(MultiplierParams::new(4, 0.5).unwrap(), NlsSign::Defocusing)
    }

    fn data() -> FourierState {
        FourierState::from_amplitudes(
            4.0,
            [(-5, Complex64::new(0.3, 0.1)), (2, Complex64::new(0.4, -0.2)), (17, Complex64::new(0.2, 0.2)), (-19, Complex64::new(-0.1, 0.25))],
        )
        .unwrap()
    }

    #[test]
    fn simpson_rule() {
        let h = 0.1;
        let v: Vec<f64> = (0..=10).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h).unwrap() - 0.25).abs() < 1e-15);
        assert!(simpson(&v[..4], h).is_err());
        assert_eq!(simpson(&v[..1], h).unwrap(), 0.0);
    }

    #[test]
    fn factorised_elongation_matches_enumeration() {
        let u = data();
        let c = ctx();
        let (modes, amps): (Vec<i64>, Vec<Complex64>) = u.amplitudes().unzip();
        let table = SexticTable::build(&modes, 4, &c, 1 << 20).unwrap();
        let f = quintic_projected(&modes, &amps, 4.0);
        let sym = |t: &FreqTuple| evaluate_symbol(SymbolId::Sigma6, t, &c);
        let mut naive = Complex64::new(0.0, 0.0);
        for j in 1..=6 {
            let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
            naive += elongation_naive(sym, j, &u, 1 << 20).unwrap() * sign;
        }
        let fact = table.lambda10_elongated(&amps, &f, |s| s.sigma6);
        assert!((naive - fact).norm() <= 1e-11 * naive.norm(), "{naive} vs {fact}");
    }

    #[test]
    fn energy_matches_symbol_form() {
        let u = data();
        let c = ctx();
        let (modes, amps): (Vec<i64>, Vec<Complex64>) = u.amplitudes().unzip();
        let table = SexticTable::build(&modes, 4, &c, 1 << 20).unwrap();
        let want = crate::imethod::lambda::energy_e1i(&u, &c).unwrap();
        assert!((table.energy(&amps) - want).abs() < 1e-12 * want);
    }

    #[test]
    fn rates_match_finite_differences() {
        let tr = integrate_galerkin(&data(), 0.02, 1e-4, NlsSign::Defocusing, &GalerkinOptions::default()).unwrap();
        let err = derivative_check(&tr, &ctx(), 1 << 20).unwrap();
        assert!(err < 1e-6, "{err}");
    }

    #[test]
    fn residual_vanishes_on_empty_interval() {
        let tr = integrate_galerkin(&data(), 0.0, 0.01, NlsSign::Defocusing, &GalerkinOptions::default()).unwrap();
        let r = ftc_residual(&tr, &ctx(), 1 << 20).unwrap();
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn single_zero_mode_residual() {
        let u = FourierState::from_amplitudes(4.0, [(0, Complex64::new(0.7, 0.1))]).unwrap();
        let tr = integrate_galerkin(&u, 0.1, 0.01, NlsSign::Defocusing, &GalerkinOptions::default()).unwrap();
        let r = ftc_residual(&tr, &ctx(), 1 << 20).unwrap();
        assert!(r.absolute.abs() < 1e-12, "{r:?}");
    }
}
