//! Empirical constants in the pointwise symbol bounds.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lambda::lambda_n;
use super::multiplier::{apply_i, MultiplierParams};
use super::resonance::{canonical_order, in_upsilon6, ResonanceKind, Thresholds};
use super::symbols::{sextic_symbols, NlsSign, SymbolContext};
use super::tuple::{dyadic_class, FreqTuple};
use crate::error::{Error, Result};
use crate::fourier::FourierState;
use crate::rng::{stream, stream_id, LabRng};
use crate::strichartz::ls_slope;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScanParams {
    pub s: f64,
    pub samples: usize,
    pub n_list: Vec<u64>,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub sign: NlsSign,
    /// Random six-mode states per `N` for the `Λ₆(σ̃₆)` decay fit.
    pub states: usize,
}

impl BoundScanParams {
    pub fn new(s: f64, samples: usize, n_list: Vec<u64>, seed: u64) -> Self {
        BoundScanParams {
            s,
            samples,
            n_list,
            seed,
            thresholds: Thresholds::default(),
            sign: NlsSign::Defocusing,
            states: 32,
        }
    }
}

/// Largest observed ratio and the tuple attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RatioMax {
    pub count: u64,
    pub max: f64,
    pub argmax: Option<Vec<i64>>,
}

impl RatioMax {
    fn push(&mut self, ratio: f64, js: &[i64]) {
        self.count += 1;
        if ratio > self.max || self.argmax.is_none() {
            self.max = ratio;
            self.argmax = Some(js.to_vec());
        }
    }

    fn merge(&mut self, other: RatioMax) {
        self.count += other.count;
        if other.argmax.is_some() && (self.argmax.is_none() || other.max > self.max) {
            self.max = other.max;
            self.argmax = other.argmax;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BoundRecord {
    pub n: u64,
    /// Accepted tuples (on `Γ₆ ∩ Υ₆`).
    pub accepted: u64,
    pub rejected: u64,
    /// Nonresonant tuples with `Ω₆ = 0` and a nonzero numerator.
    pub gaps: u64,
    pub nonresonant: u64,
    pub resonant: u64,
    /// `|σ̃₆| / bound` on nonresonant tuples.
    pub sigma_tilde: RatioMax,
    /// 99.9% quantile of the same ratio.
    pub sigma_tilde_q999: f64,
    /// `|M̄₆| / bound` for the four case bounds, on resonant tuples meeting each case's hypotheses.
    pub m6bar: [RatioMax; 4],
    /// Largest `|Λ₆(σ̃₆)| / ‖Iu‖⁶_{H¹}` over random states.
    pub lambda6_ratio: f64,
    pub lambda6_gaps: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundScan {
    pub records: Vec<BoundRecord>,
    /// max/min across `N` of the largest `σ̃₆` ratio.
    pub sigma_spread: f64,
    /// Same for the 99.9% quantile.
    pub sigma_q999_spread: f64,
    /// Same for each `M̄₆` case; `None` when some `N` has no sample of that case.
    pub m6bar_spread: [Option<f64>; 4],
    /// Least-squares slope of `log Λ₆-ratio` against `log N`.
    pub decay_exponent: f64,
}

fn spread(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    let v = v?;
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    (lo > 0.0).then(|| hi / lo)
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn signed(x: f64, rng: &mut impl Rng) -> i64 {
    let v = x.round().max(1.0) as i64;
    if rng.gen() {
        v
    } else {
        -v
    }
}

/// One candidate tuple from one of four families.
///
/// 0: a high pair `k₂ ≈ −k₁` over low entries; 1: four high entries, pairwise
/// nearly cancelling or free; 2: six comparable entries; 3: unstructured.
fn sample_tuple(r: &mut LabRng, n: f64) -> Vec<i64> {
    let high = |r: &mut LabRng| signed(n * log_uniform(r, 1.0, 8.0), r);
    let low = |r: &mut LabRng, top: f64| signed(log_uniform(r, 1.0, top.max(1.5)), r);
    let family = r.gen_range(0..4);
    let mut js = [0i64; 6];
    match family {
        0 => {
            js[0] = high(r);
            let d = if r.gen_bool(0.25) { 0 } else { low(r, n) };
            js[1] = -js[0] + d;
            let top = n / log_uniform(r, 1.0, n);
            for slot in js.iter_mut().take(5).skip(2) {
                *slot = low(r, top);
            }
        }
        1 => {
            js[0] = high(r);
            js[2] = high(r);
            if r.gen() {
                js[1] = -js[0] + low(r, 2.0 * n);
                js[3] = -js[2] + low(r, 2.0 * n);
            } else {
                js[1] = high(r);
                js[3] = high(r);
            }
            js[4] = low(r, n / 4.0);
        }
        2 => {
            for slot in js.iter_mut().take(5) {
                *slot = high(r);
            }
        }
        _ => {
            for slot in js.iter_mut().take(5) {
                *slot = signed(n * log_uniform(r, 1.0 / n, 8.0), r);
            }
        }
    }
    js[5] = 0;
    let mut odd = [js[0], js[2], js[4]];
    let mut even = [js[1], js[3]];
    odd.shuffle(r);
    even.shuffle(r);
    let partial = odd.iter().sum::<i64>() + even.iter().sum::<i64>();
    let mut out = vec![odd[0], even[0], odd[1], even[1], odd[2], -partial];
    if r.gen() {
        out = (0..6).map(|i| if i % 2 == 0 { -out[i + 1] } else { -out[i - 1] }).collect();
    }
    out
}

/// Bound for the nonresonant symbol: `m²(N₃*)` when `N₁ ∼ N₂ ≫ N₃* ∼ N₄*`, else `m(N₁*)m(N₃*)`.
fn sigma_tilde_bound(ks: &[f64; 6], star: &[f64; 6], p: &MultiplierParams, th: &Thresholds) -> f64 {
    let (n1, n2) = (dyadic_class(ks[0]), dyadic_class(ks[1]));
    if th.sim(n1, n2) && th.gg(n1.min(n2), star[2]) && th.sim(star[2], star[3]) {
        p.m(star[2]).powi(2)
    } else {
        p.m(star[0]) * p.m(star[2])
    }
}

/// Bounds of the four cases whose hypotheses hold at `ks`.
fn m6bar_bounds(ks: &[f64; 6], star: &[f64; 6], p: &MultiplierParams, th: &Thresholds) -> [Option<f64>; 4] {
    let mn = |x: f64| p.m(x) * x;
    let s12 = (ks[0] + ks[1]).abs();
    let s34 = (ks[2] + ks[3]).abs();
    let (n1, n3, n5) = (star[0], star[2], star[4]);
    let c1 = th.sim(n1, star[1]).then(|| mn(n1) * mn(n3));
    let (d1, d2) = (dyadic_class(ks[0]), dyadic_class(ks[1]));
    let c2 = (th.sim(n1, d1)
        && th.sim(n1, d2)
        && th.c_sim * d1.min(d2) >= p.big_n()
        && th.gg(p.big_n(), n3)
        && th.sim(n3, star[3])
        && s12 <= th.c_sim * n3 * n3 / n1)
        .then_some(n3 * n3);
    let c3 = (s12.max(s34) <= th.c_sim * n5).then(|| mn(n1) * mn(n5));
    let n12 = dyadic_class(s12);
    let c4 = (s12 > 0.0
        && th.sim(n12, dyadic_class(s34))
        && n12 <= th.c_sim * n1
        && th.gg(n12, star[4]))
    .then(|| mn(n1) * mn(n12));
    [c1, c2, c3, c4]
}

fn scan_tuples(n: u64, params: &BoundScanParams) -> Result<BoundRecord> {
    let p = MultiplierParams::new(n, params.s)?;
    let ctx = SymbolContext { multiplier: p, sign: params.sign, thresholds: params.thresholds };
    let th = &params.thresholds;
    const CHUNK: usize = 4096;
    let chunks = params.samples.div_ceil(CHUNK);
    let parts: Vec<Result<(BoundRecord, Vec<f64>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(params.seed, stream_id(n, c as u64));
            let mut rec = BoundRecord { n, ..Default::default() };
            let mut ratios = Vec::new();
            let todo = CHUNK.min(params.samples - c * CHUNK);
            while rec.accepted < todo as u64 {
                let js = sample_tuple(&mut rng, n as f64);
                let t = FreqTuple { js, lambda: 1 };
                if !in_upsilon6(&t, &p, th) {
                    rec.rejected += 1;
                    continue;
                }
                rec.accepted += 1;
                let sym = match sextic_symbols(&t, &ctx) {
                    Ok(s) => s,
                    Err(Error::ResonanceGap { .. }) => {
                        rec.gaps += 1;
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let ks = canonical_order(&t)?;
                let mut star = ks.map(dyadic_class);
                star.sort_by(|a, b| b.total_cmp(a));
                if sym.kind == Some(ResonanceKind::NonResonant) {
                    rec.nonresonant += 1;
                    let b = sigma_tilde_bound(&ks, &star, &p, th);
                    let ratio = sym.sigma6_tilde.abs() / b;
                    rec.sigma_tilde.push(ratio, &t.js);
                    ratios.push(ratio);
                } else {
                    rec.resonant += 1;
                    for (slot, bound) in rec.m6bar.iter_mut().zip(m6bar_bounds(&ks, &star, &p, th)) {
                        if let Some(b) = bound {
                            slot.push(sym.m6bar.abs() / b, &t.js);
                        }
                    }
                }
            }
            Ok((rec, ratios))
        })
        .collect();
    let mut out = BoundRecord { n, ..Default::default() };
    let mut all = Vec::new();
    for part in parts {
        let (r, ratios) = part?;
        all.extend(ratios);
        out.accepted += r.accepted;
        out.rejected += r.rejected;
        out.gaps += r.gaps;
        out.nonresonant += r.nonresonant;
        out.resonant += r.resonant;
        out.sigma_tilde.merge(r.sigma_tilde);
        for (a, b) in out.m6bar.iter_mut().zip(r.m6bar) {
            a.merge(b);
        }
    }
    all.sort_by(f64::total_cmp);
    if !all.is_empty() {
        out.sigma_tilde_q999 = all[((all.len() - 1) as f64 * 0.999).round() as usize];
    }
    Ok(out)
}

/// Three modes in `[1, N/4]` and three in `[N, 8N]`, random signs and Gaussian amplitudes.
fn random_six_mode_state(rng: &mut impl Rng, n: f64) -> FourierState {
    let mut modes = Vec::with_capacity(6);
    while modes.len() < 6 {
        let mag = if modes.len() < 3 { log_uniform(rng, 1.0, (n / 4.0).max(1.5)) } else { n * log_uniform(rng, 1.0, 8.0) };
        let j = signed(mag, rng);
        if !modes.contains(&j) {
            modes.push(j);
        }
    }
    FourierState::from_amplitudes(
        1.0,
        modes.into_iter().map(|j| {
            let a: f64 = rng.sample(rand_distr::StandardNormal);
            let b: f64 = rng.sample(rand_distr::StandardNormal);
            (j, Complex64::new(a, b))
        }),
    )
    .expect("unit torus is valid")
}

fn scan_states(n: u64, params: &BoundScanParams) -> Result<(f64, u64)> {
    let p = MultiplierParams::new(n, params.s)?;
    let ctx = SymbolContext { multiplier: p, sign: params.sign, thresholds: params.thresholds };
    let results: Vec<Result<Option<f64>>> = (0..params.states)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(params.seed, stream_id(1 << 40 | n, i as u64));
            let u = random_six_mode_state(&mut rng, n as f64);
            let states = vec![&u; 6];
            match lambda_n(|t| sextic_symbols(t, &ctx).map(|s| s.sigma6_tilde), &states, u64::MAX) {
                Ok((v, _)) => {
                    let iu = apply_i(&u, &p);
                    let h1 = iu.l2_norm_sq() + iu.hdot_norm_sq(1.0);
                    Ok(Some(v.norm() / h1.powi(3)))
                }
                Err(Error::ResonanceGap { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut best: f64 = 0.0;
    let mut gaps = 0;
    for r in results {
        match r? {
            Some(v) => best = best.max(v),
            None => gaps += 1,
        }
    }
    Ok((best, gaps))
}

/// Samples `Γ₆ ∩ Υ₆` at each `N` and records the worst ratio of each symbol to its bound.
pub fn bound_scan_symbols(params: &BoundScanParams) -> Result<BoundScan> {
    if params.n_list.is_empty() {
        return Err(Error::invalid("N list is empty"));
    }
    if params.samples == 0 {
        return Err(Error::invalid("sample count must be positive"));
    }
    let mut records = Vec::with_capacity(params.n_list.len());
    for &n in &params.n_list {
        let mut rec = scan_tuples(n, params)?;
        let (ratio, gaps) = scan_states(n, params)?;
        rec.lambda6_ratio = ratio;
        rec.lambda6_gaps = gaps;
        records.push(rec);
    }
    let sigma_spread =
        spread(records.iter().map(|r| (r.sigma_tilde.count > 0).then_some(r.sigma_tilde.max))).unwrap_or(f64::INFINITY);
    let sigma_q999_spread = spread(records.iter().map(|r| (r.sigma_tilde.count > 0).then_some(r.sigma_tilde_q999)))
        .unwrap_or(f64::INFINITY);
    let m6bar_spread =
        std::array::from_fn(|c| spread(records.iter().map(|r| (r.m6bar[c].count > 0).then_some(r.m6bar[c].max))));
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.lambda6_ratio > 0.0)
        .map(|r| ((r.n as f64).ln(), r.lambda6_ratio.ln()))
        .collect();
    let decay_exponent = if pts.len() >= 2 { ls_slope(&pts) } else { f64::NAN };
    Ok(BoundScan { records, sigma_spread, sigma_q999_spread, m6bar_spread, decay_exponent })
}
