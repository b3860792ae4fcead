use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::multiplier::apply_i;
use super::symbols::{evaluate_symbol, SymbolContext, SymbolId};
use super::tuple::FreqTuple;
use crate::error::{Error, Result};
use crate::fourier::FourierState;
use crate::strichartz::l6_space_integral;

/// Largest number of enumerated tuples a `Γ_n` sum may visit.
pub const DEFAULT_GAMMA_CAP: u64 = 2_000_000;

/// Relative size of an imaginary part tolerated by [`lambda_n_evaluate`].
pub const IMAGINARY_TOL: f64 = 1e-10;

/// Integer torus scale shared by all states.
pub(crate) fn common_lambda(states: &[&FourierState]) -> Result<i64> {
    let Some(first) = states.first() else {
        return Err(Error::invalid("no states supplied"));
    };
    let l = first.lambda();
    if l.fract() != 0.0 || l > i64::MAX as f64 {
        return Err(Error::invalid(format!("multilinear sums need an integer torus scale, got {l}")));
    }
    if states.iter().any(|s| s.lambda() != l) {
        return Err(Error::invalid("states live on different tori"));
    }
    Ok(l as i64)
}

/// `(k-index, coefficient)` pairs of one slot; even slots are conjugated and negated.
fn slot(state: &FourierState, position: usize) -> Vec<(i64, Complex64)> {
    if position.is_multiple_of(2) {
        state.amplitudes().collect()
    } else {
        state.amplitudes().map(|(j, c)| (-j, c.conj())).collect()
    }
}

/// `Λ_n(M; u₁,…,u_n) = λ^{1−n} Σ_{Γ_n} M(k) ∏ û_j(k_j)` times `2π`, even
/// factors conjugated. Returns the complex value and `Σ|terms|`.
pub fn lambda_n<F>(symbol: F, states: &[&FourierState], cap: u64) -> Result<(Complex64, f64)>
where
    F: Fn(&FreqTuple) -> Result<f64> + Sync,
{
    let n = states.len();
    if n < 2 || n % 2 == 1 {
        return Err(Error::invalid(format!("arity {n} must be even and at least 2")));
    }
    let lambda = common_lambda(states)?;
    let slots: Vec<Vec<(i64, Complex64)>> = states.iter().enumerate().map(|(i, s)| slot(s, i)).collect();
    if slots.iter().any(|s| s.is_empty()) {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let work = slots[..n - 1].iter().fold(1u64, |acc, s| acc.saturating_mul(s.len() as u64));
    if work > cap {
        return Err(Error::cap("Γ_n enumeration size", work, cap));
    }
    let last: HashMap<i64, Complex64> = slots[n - 1].iter().copied().collect();
    let norm = 2.0 * PI * (lambda as f64).powi(1 - (n as i32) / 2);

    let partial: Vec<Result<(Complex64, f64)>> = slots[0]
        .par_iter()
        .map(|&(j0, c0)| {
            let mut js = vec![0i64; n];
            js[0] = j0;
            let mut acc = (Complex64::new(0.0, 0.0), 0.0);
            walk(&slots, &last, 1, j0, c0, &mut js, lambda, &symbol, &mut acc)?;
            Ok(acc)
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for r in partial {
        let (v, a) = r?;
        total += v;
        abs += a;
    }
    Ok((total * norm, abs * norm))
}

#[allow(clippy::too_many_arguments)]
fn walk<F>(
    slots: &[Vec<(i64, Complex64)>],
    last: &HashMap<i64, Complex64>,
    depth: usize,
    sum: i64,
    prod: Complex64,
    js: &mut Vec<i64>,
    lambda: i64,
    symbol: &F,
    acc: &mut (Complex64, f64),
) -> Result<()>
where
    F: Fn(&FreqTuple) -> Result<f64>,
{
    let n = slots.len();
    if depth == n - 1 {
        if let Some(&c) = last.get(&-sum) {
            js[n - 1] = -sum;
            let t = FreqTuple { js: js.clone(), lambda };
            let term = prod * c * symbol(&t)?;
            acc.0 += term;
            acc.1 += term.norm();
        }
        return Ok(());
    }
    for &(j, c) in &slots[depth] {
        js[depth] = j;
        walk(slots, last, depth + 1, sum + j, prod * c, js, lambda, symbol, acc)?;
    }
    Ok(())
}

/// Real part of [`lambda_n`], refusing values with a non-negligible imaginary part.
pub fn lambda_n_evaluate<F>(symbol: F, states: &[&FourierState], cap: u64) -> Result<f64>
where
    F: Fn(&FreqTuple) -> Result<f64> + Sync,
{
    let (v, abs) = lambda_n(symbol, states, cap)?;
    if v.im.abs() > IMAGINARY_TOL * abs.max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { residue: v.im, value: v.re });
    }
    Ok(v.re)
}

/// `Λ_n` of a named symbol with every slot equal to `u`.
pub fn lambda_symbol(id: SymbolId, u: &FourierState, arity: usize, ctx: &SymbolContext, cap: u64) -> Result<f64> {
    let states = vec![u; arity];
    lambda_n_evaluate(|t| evaluate_symbol(id, t, ctx), &states, cap)
}

/// `½‖∂ₓu‖² + (ε/6)‖u‖⁶_{L⁶}`, conserved by the (truncated) flow.
pub fn hamiltonian(u: &FourierState, eps: f64) -> f64 {
    0.5 * u.hdot_norm_sq(1.0) + eps / 6.0 * l6_space_integral(u)
}

/// `E¹_I(u) = ½‖Iu‖²_{Ḣ¹} + (ε/6)‖Iu‖⁶_{L⁶}`.
///
/// Also evaluates `Λ₂(σ₂) + Λ₆(σ₆)` and fails if the two forms differ by more
/// than `1e−10` relative.
pub fn energy_e1i(u: &FourierState, ctx: &SymbolContext) -> Result<f64> {
    let iu = apply_i(u, &ctx.multiplier);
    let norm_form = hamiltonian(&iu, ctx.eps());
    let symbol_form = lambda_symbol(SymbolId::Sigma2, u, 2, ctx, DEFAULT_GAMMA_CAP)?
        + lambda_symbol(SymbolId::Sigma6, u, 6, ctx, DEFAULT_GAMMA_CAP)?;
    let scale = norm_form.abs().max(symbol_form.abs());
    if (norm_form - symbol_form).abs() > 1e-10 * scale {
        return Err(Error::EnergyMismatch { symbol: symbol_form, norm: norm_form });
    }
    Ok(norm_form)
}
