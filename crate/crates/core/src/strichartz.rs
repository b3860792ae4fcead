//! Space-time `L⁶` integrals of free evolutions, the sextuple spectrum `h(τ)`,
//! and scans of the short-time Strichartz ratio.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierState;
use crate::lattice::is_dyadic;
use crate::quadrature::composite_gauss;
use crate::rng::{stream, stream_id};

/// Default cap on the number of modes in sextuple sums.
pub const DEFAULT_SUPPORT_CAP: usize = 96;
/// Default cap on `N` for [`h_spectrum`].
pub const DEFAULT_H_CAP: u64 = 16;

/// Ordered triples `(a, b, c)` drawn from three lists, grouped by `(a+b+c, a²+b²+c²)`.
fn triple_groups<T>(lists: [&[(i64, T)]; 3]) -> BTreeMap<i64, BTreeMap<i64, T>>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Mul<Output = T>,
{
    let mut groups: BTreeMap<i64, BTreeMap<i64, T>> = BTreeMap::new();
    for &(a, wa) in lists[0] {
        for &(b, wb) in lists[1] {
            let wab = wa * wb;
            for &(c, wc) in lists[2] {
                let w = wab * wc;
                let entry = groups.entry(a + b + c).or_default();
                entry.entry(a * a + b * b + c * c).and_modify(|v| *v = *v + w).or_insert(w);
            }
        }
    }
    groups
}

/// `∫₀ᵀ e^{-itΩ} dt`, with the `Ω = 0` branch decided on the integer numerator.
fn resolvent_kernel(numerator: i64, scale: f64, t: f64) -> Complex64 {
    if numerator == 0 {
        return Complex64::new(t, 0.0);
    }
    let omega = numerator as f64 * scale;
    (Complex64::new(1.0, 0.0) - Complex64::cis(-t * omega)) / Complex64::new(0.0, omega)
}

/// `∫₀ᵀ ∫_{λ𝕋} |∏ⱼ e^{itΔ}uⱼ|² dx dt` summed exactly over frequency sextuples.
pub fn triple_product_integral(states: [&FourierState; 3], t: f64, support_cap: usize) -> Result<f64> {
    let lambda = states[0].lambda();
    if states.iter().any(|s| s.lambda() != lambda) {
        return Err(Error::invalid("states live on different tori"));
    }
    if let Some(s) = states.iter().find(|s| s.len() > support_cap) {
        return Err(Error::cap("support size", s.len(), support_cap));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("time horizon must be finite and nonnegative"));
    }
    let modes: Vec<Vec<(i64, Complex64)>> = states.iter().map(|s| s.amplitudes().collect()).collect();
    let groups = triple_groups([&modes[0], &modes[1], &modes[2]]);
    let scale = 1.0 / (lambda * lambda);
    let mut total = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for g in groups.values() {
        for (&s, &p) in g {
            for (&s2, &q) in g {
                let term = p * q.conj() * resolvent_kernel(s - s2, scale, t);
                total += term;
                magnitude += term.norm();
            }
        }
    }
    let factor = 2.0 * PI * scale;
    let (value, residue) = (total.re * factor, total.im * factor);
    if residue.abs() > 1e-12 * (magnitude * factor).max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { residue, value });
    }
    Ok(value)
}

/// `∫₀ᵀ ∫_{λ𝕋} |e^{itΔ}u|⁶ dx dt` summed exactly over frequency sextuples.
pub fn l6_time_integral_exact(state: &FourierState, t: f64, support_cap: usize) -> Result<f64> {
    triple_product_integral([state; 3], t, support_cap)
}

/// Same integral with equispaced quadrature in space and the composite trapezoid rule in time.
pub fn l6_norm_quadrature(state: &FourierState, t: f64, mx: usize, mt: usize) -> Result<f64> {
    let span = state.index_span().map_or(1, |(lo, hi)| (hi - lo + 1) as usize);
    if mx < 6 * span + 1 {
        return Err(Error::invalid(format!("Mx = {mx} aliases: need at least {}", 6 * span + 1)));
    }
    if mt < 2 {
        return Err(Error::invalid("Mt must be at least 2"));
    }
    let dx = 2.0 * PI * state.lambda() / mx as f64;
    let slice = |s: f64| -> f64 {
        let v = state.evolve_linear(s);
        (0..mx).map(|i| v.eval(i as f64 * dx).norm_sqr().powi(3)).sum::<f64>() * dx
    };
    let dt = t / (mt - 1) as f64;
    let mut sum = 0.0;
    for i in 0..mt {
        let w = if i == 0 || i == mt - 1 { 0.5 } else { 1.0 };
        sum += w * slice(i as f64 * dt);
    }
    Ok(sum * dt)
}

/// Spatial integral `∫|u|⁶` for many time slices, using one FFT per slice.
struct SliceEvaluator {
    fft: Arc<dyn Fft<f64>>,
    size: usize,
    lambda: f64,
    modes: Vec<(i64, Complex64)>,
    buf: Vec<Complex64>,
}

impl SliceEvaluator {
    fn new(state: &FourierState) -> Self {
        let (lo, hi) = state.index_span().unwrap_or((0, 0));
        // |u|⁶ has spatial frequencies in [-3(hi-lo), 3(hi-lo)].
        let size = (3 * (hi - lo) as usize + 1).next_power_of_two().max(2);
        let fft = FftPlanner::new().plan_fft_inverse(size);
        SliceEvaluator {
            fft,
            size,
            lambda: state.lambda(),
            modes: state.amplitudes().collect(),
            buf: vec![Complex64::new(0.0, 0.0); size],
        }
    }

    fn integral(&mut self, t: f64) -> f64 {
        self.buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        let l2 = self.lambda * self.lambda;
        let m = self.size as i64;
        for &(j, c) in &self.modes {
            self.buf[j.rem_euclid(m) as usize] += c * Complex64::cis(-((j * j) as f64 / l2) * t);
        }
        self.fft.process(&mut self.buf);
        let s: f64 = self.buf.iter().map(|v| v.norm_sqr().powi(3)).sum();
        // u = λ^{-1/2} Σ c e^{ijy}, dx = λ dy, dy = 2π/M.
        s * 2.0 * PI / (self.size as f64 * self.lambda * self.lambda)
    }
}

/// `∫_{λ𝕋} |u|⁶ dx`, exact for the represented trigonometric polynomial.
pub fn l6_space_integral(state: &FourierState) -> f64 {
    if state.is_empty() {
        return 0.0;
    }
    SliceEvaluator::new(state).integral(0.0)
}

/// Largest temporal frequency of `∫|e^{itΔ}u|⁶ dx` as a function of `t`.
fn temporal_bandwidth(state: &FourierState) -> f64 {
    let sq: Vec<i64> = state.amplitudes().map(|(j, _)| j * j).collect();
    match (sq.iter().min(), sq.iter().max()) {
        (Some(a), Some(b)) => 3.0 * (b - a) as f64 / (state.lambda() * state.lambda()),
        _ => 0.0,
    }
}

const GAUSS_NODES: usize = 24;
const MAX_PHASE_PER_PANEL: f64 = 20.0;

/// Same integral by exact FFT quadrature in space and composite Gauss–Legendre in time.
///
/// Used for supports too large for sextuple sums. Panels are sized so that the
/// fastest temporal oscillation turns through at most 20 radians per panel.
pub fn l6_time_integral_spectral(state: &FourierState, t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid("time horizon must be finite and nonnegative"));
    }
    if state.is_empty() || t == 0.0 {
        return Ok(0.0);
    }
    let panels = ((temporal_bandwidth(state) * t / MAX_PHASE_PER_PANEL).ceil() as usize).max(1);
    let mut eval = SliceEvaluator::new(state);
    Ok(composite_gauss(0.0, t, panels, GAUSS_NODES)
        .into_iter()
        .map(|(s, w)| w * eval.integral(s))
        .sum())
}

/// The weighted sextuple spectrum `h(τ)` at integer frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HSpectrum {
    pub n: u64,
    /// `τ ↦ h(τ)` for `τ ≥ 0`; absent keys are zero.
    pub values: BTreeMap<u64, f64>,
}

impl HSpectrum {
    pub fn get(&self, tau: u64) -> f64 {
        self.values.get(&tau).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.values().sum()
    }
}

/// `h(τ) = Σ ∏|f̂(nᵢ)||f̂(mᵢ)|` over sextuples with `Σnᵢ = Σmᵢ` and `|Σnᵢ² − Σmᵢ²| = τ`.
pub fn h_spectrum(magnitudes: &BTreeMap<i64, f64>, n: u64, n_cap: u64) -> Result<HSpectrum> {
    if !is_dyadic(n) {
        return Err(Error::invalid(format!("N = {n} is not a power of two")));
    }
    if n > n_cap {
        return Err(Error::cap("N", n, n_cap));
    }
    let bound = 2 * n as i64;
    if let Some((&k, _)) = magnitudes.iter().find(|(&k, _)| k.abs() > bound) {
        return Err(Error::invalid(format!("frequency {k} outside [-2N, 2N]")));
    }
    if let Some((&k, _)) = magnitudes.iter().find(|(_, &v)| !(v.is_finite() && v >= 0.0)) {
        return Err(Error::invalid(format!("magnitude at {k} is not a nonnegative number")));
    }
    let modes: Vec<(i64, f64)> = magnitudes.iter().filter(|(_, &v)| v > 0.0).map(|(&k, &v)| (k, v)).collect();
    let groups = triple_groups([&modes, &modes, &modes]);
    let mut values = BTreeMap::new();
    for g in groups.values() {
        for (&s, &p) in g {
            for (&s2, &q) in g {
                *values.entry(s.abs_diff(s2)).or_insert(0.0) += p * q;
            }
        }
    }
    Ok(HSpectrum { n, values })
}

/// `(1/K) Σ_{K ≤ |τ| ≤ 2K} h(τ)`.
pub fn dyadic_block_average(h: &HSpectrum, k: f64) -> Result<f64> {
    if !(k.is_finite() && k >= 1.0) {
        return Err(Error::invalid(format!("block scale must be at least 1, got {k}")));
    }
    let lo = k.ceil() as u64;
    let hi = (2.0 * k).floor() as u64;
    Ok(h.values.range(lo..=hi).map(|(_, v)| v).sum::<f64>() / k)
}

/// Supremum of [`dyadic_block_average`] over `K = N^α 2^j`, `j ≥ 0`, with its maximizer.
pub fn block_average_sup(h: &HSpectrum, alpha: f64) -> (f64, f64) {
    let top = h.values.keys().next_back().copied().unwrap_or(0) as f64;
    let mut k = (h.n as f64).powf(alpha).max(1.0);
    let mut best = (0.0, k);
    while k <= top.max(1.0) {
        let v = dyadic_block_average(h, k).unwrap_or(0.0);
        if v > best.0 {
            best = (v, k);
        }
        k *= 2.0;
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ensemble {
    pub random_members: usize,
    pub constant_profile: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzRecord {
    pub n: u64,
    pub member: String,
    pub l6_integral: f64,
    pub l2_norm: f64,
    pub ratio: f64,
    pub method: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzScan {
    pub alpha: f64,
    pub records: Vec<StrichartzRecord>,
    /// `(N, max ratio)` in the order of the N list.
    pub maxima: Vec<(u64, f64)>,
    pub slope: f64,
}

/// Supports at most this many modes go through the sextuple sum; larger ones use FFT quadrature.
pub const EXACT_SCAN_MODES: usize = 33;

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Ensemble member `index` supported on `[-N, N]` at `λ = 1`.
pub fn ensemble_member(n: u64, index: usize, ensemble: &Ensemble, seed: u64) -> Result<(String, FourierState)> {
    let range = -(n as i64)..=n as i64;
    if ensemble.constant_profile && index == 0 {
        let state = FourierState::from_amplitudes(1.0, range.map(|j| (j, Complex64::new(1.0, 0.0))))?;
        return Ok(("constant".to_string(), state));
    }
    let r = index - usize::from(ensemble.constant_profile);
    let mut rng = stream(seed, stream_id(n, r as u64));
    Ok((format!("gaussian-{r}"), FourierState::random_gaussian(1.0, range, &mut rng)?))
}

/// `R(f, N) = (∫₀^{N^{-α}} ∫|e^{itΔ}f|⁶)^{1/6} / ‖f‖_{L²}` over an ensemble, per `N`.
pub fn strichartz_scan(alpha: f64, n_list: &[u64], ensemble: &Ensemble, seed: u64) -> Result<StrichartzScan> {
    if n_list.is_empty() {
        return Err(Error::invalid("N list is empty"));
    }
    if let Some(&n) = n_list.iter().find(|&&n| !is_dyadic(n)) {
        return Err(Error::invalid(format!("N = {n} is not a power of two")));
    }
    let members = ensemble.random_members + usize::from(ensemble.constant_profile);
    if members == 0 {
        return Err(Error::invalid("ensemble is empty"));
    }
    let jobs: Vec<(u64, usize)> = n_list.iter().flat_map(|&n| (0..members).map(move |i| (n, i))).collect();
    let records: Vec<StrichartzRecord> = jobs
        .par_iter()
        .map(|&(n, i)| {
            let (member, state) = ensemble_member(n, i, ensemble, seed)?;
            let t = (n as f64).powf(-alpha);
            let (l6, method) = if state.len() <= EXACT_SCAN_MODES {
                (l6_time_integral_exact(&state, t, EXACT_SCAN_MODES)?, "exact")
            } else {
                (l6_time_integral_spectral(&state, t)?, "spectral")
            };
            let l2 = state.l2_norm();
            Ok(StrichartzRecord {
                n,
                member,
                l6_integral: l6,
                l2_norm: l2,
                ratio: l6.powf(1.0 / 6.0) / l2,
                method: method.to_string(),
            })
        })
        .collect::<Result<_>>()?;
    let maxima: Vec<(u64, f64)> = n_list
        .iter()
        .map(|&n| {
            let m = records.iter().filter(|r| r.n == n).map(|r| r.ratio).fold(0.0, f64::max);
            (n, m)
        })
        .collect();
    let pts: Vec<(f64, f64)> = maxima.iter().map(|&(n, m)| ((n as f64).ln(), m.ln())).collect();
    Ok(StrichartzScan { alpha, records, maxima, slope: ls_slope(&pts) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub n: u64,
    pub member: String,
    pub lhs: f64,
    pub h0_term: f64,
    pub block_sup: f64,
    pub block_k: f64,
    pub ratio: f64,
}

/// Compares `∫₀^{N^{-α}}∫|e^{itΔ}f|⁶` with `2π(N^{-α} h(0) + sup_K block average)` for `f̂ ≥ 0` on `[-N, N]`.
pub fn chain_ratio(magnitudes: &BTreeMap<i64, f64>, n: u64, alpha: f64, member: &str) -> Result<ChainRecord> {
    let h = h_spectrum(magnitudes, n, DEFAULT_H_CAP)?;
    let state = FourierState::from_amplitudes(
        1.0,
        magnitudes.iter().map(|(&k, &v)| (k, Complex64::new(v, 0.0))),
    )?;
    let t = (n as f64).powf(-alpha);
    let lhs = l6_time_integral_exact(&state, t, DEFAULT_SUPPORT_CAP)?;
    let h0_term = t * h.get(0);
    let (block_sup, block_k) = block_average_sup(&h, alpha);
    let rhs = 2.0 * PI * (h0_term + block_sup);
    Ok(ChainRecord { n, member: member.to_string(), lhs, h0_term, block_sup, block_k, ratio: lhs / rhs })
}

/// [`chain_ratio`] for the constant profile and `random_members` seeded uniform profiles per `N`.
pub fn chain_scan(n_list: &[u64], alpha: f64, random_members: usize, seed: u64) -> Result<Vec<ChainRecord>> {
    use rand::Rng;
    let jobs: Vec<(u64, usize)> =
        n_list.iter().flat_map(|&n| (0..=random_members).map(move |i| (n, i))).collect();
    jobs.par_iter()
        .map(|&(n, i)| {
            let range = -(n as i64)..=n as i64;
            if i == 0 {
                let mags = range.map(|k| (k, 1.0)).collect();
                chain_ratio(&mags, n, alpha, "constant")
            } else {
                let mut rng = stream(seed, stream_id(n, i as u64));
                let mags = range.map(|k| (k, rng.gen::<f64>())).collect();
                chain_ratio(&mags, n, alpha, &format!("uniform-{}", i - 1))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn l6_closed_forms() {
        let a = Complex64::new(0.6, -1.1);
        let one = FourierState::from_hat(1.0, [(3, a)]).unwrap();
        for t in [0.1, 1.0, 7.0] {
            let exact = 2.0 * PI * t * a.norm().powi(6);
            assert!(rel(l6_time_integral_exact(&one, t, 8).unwrap(), exact) < 1e-12);
            assert!(rel(l6_time_integral_spectral(&one, t).unwrap(), exact) < 1e-12);
        }
        let two = FourierState::from_hat(1.0, [(0, c(1.0)), (1, c(1.0))]).unwrap();
        for t in [0.1, 1.0, 3.0] {
            assert!(rel(l6_time_integral_exact(&two, t, 8).unwrap(), 40.0 * PI * t) < 1e-12);
        }
        assert_eq!(l6_time_integral_exact(&two, 0.0, 8).unwrap(), 0.0);
    }

    #[test]
    fn l6_support_cap() {
        let s = FourierState::from_hat(1.0, (0..10).map(|j| (j, c(1.0)))).unwrap();
        assert!(l6_time_integral_exact(&s, 1.0, 9).unwrap_err().is_cap());
    }

    #[test]
    fn quadrature_agrees_with_exact() {
        let s = FourierState::from_hat(
            2.0,
            [(-3, Complex64::new(0.5, 0.2)), (0, c(1.0)), (2, Complex64::new(-0.3, 0.7)), (5, c(0.4))],
        )
        .unwrap();
        let exact = l6_time_integral_exact(&s, 0.5, 16).unwrap();
        let quad = l6_norm_quadrature(&s, 0.5, 6 * 9 + 1, 2049).unwrap();
        assert!(rel(quad, exact) < 1e-5);
        assert!(rel(l6_time_integral_spectral(&s, 0.5).unwrap(), exact) < 1e-12);
        assert!(l6_norm_quadrature(&s, 0.5, 54, 10).is_err());
        assert!(l6_norm_quadrature(&s, 0.5, 55, 1).is_err());
    }

    #[test]
    fn trapezoid_is_second_order() {
        let s = FourierState::from_hat(1.0, [(0, c(1.0)), (1, c(0.7)), (3, c(0.5))]).unwrap();
        let exact = l6_time_integral_exact(&s, 1.0, 8).unwrap();
        let e1 = (l6_norm_quadrature(&s, 1.0, 25, 65).unwrap() - exact).abs();
        let e2 = (l6_norm_quadrature(&s, 1.0, 25, 129).unwrap() - exact).abs();
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn spectral_matches_exact_at_moderate_support() {
        let ens = Ensemble { random_members: 2, constant_profile: true };
        for i in 0..3 {
            let (_, s) = ensemble_member(8, i, &ens, 5).unwrap();
            let t = 8f64.powf(-0.7);
            let a = l6_time_integral_exact(&s, t, 32).unwrap();
            let b = l6_time_integral_spectral(&s, t).unwrap();
            assert!(rel(b, a) < 1e-10, "{a} {b}");
        }
    }

    /// Five free indices; the sixth is fixed by the linear constraint.
    fn h_naive(mags: &BTreeMap<i64, f64>) -> BTreeMap<u64, f64> {
        let ks: Vec<(i64, f64)> = mags.iter().map(|(&k, &v)| (k, v)).collect();
        let mut out = BTreeMap::new();
        for &(n1, a1) in &ks {
            for &(n2, a2) in &ks {
                for &(n3, a3) in &ks {
                    for &(m1, b1) in &ks {
                        for &(m2, b2) in &ks {
                            let m3 = n1 + n2 + n3 - m1 - m2;
                            let Some(&b3) = mags.get(&m3) else { continue };
                            let tau = (n1 * n1 + n2 * n2 + n3 * n3 - m1 * m1 - m2 * m2 - m3 * m3).unsigned_abs();
                            *out.entry(tau).or_insert(0.0) += a1 * a2 * a3 * b1 * b2 * b3;
                        }
                    }
                }
            }
        }
        out.retain(|_, v| *v != 0.0);
        out
    }

    #[test]
    fn h_examples() {
        let delta: BTreeMap<i64, f64> = [(0, 1.0)].into();
        let h = h_spectrum(&delta, 1, 16).unwrap();
        assert_eq!(h.values, [(0u64, 1.0)].into());
        for pair in [[0i64, 1], [0, 2]] {
            let m: BTreeMap<i64, f64> = pair.iter().map(|&k| (k, 1.0)).collect();
            let h = h_spectrum(&m, 1, 16).unwrap();
            assert_eq!(h.get(0), 20.0);
            assert_eq!(h.total(), 20.0);
        }
        assert!(h_spectrum(&delta, 32, 16).unwrap_err().is_cap());
        assert!(h_spectrum(&[(5, 1.0)].into(), 2, 16).is_err());
        assert!(h_spectrum(&delta, 3, 16).is_err());
    }

    #[test]
    fn h_matches_five_index_oracle() {
        let m: BTreeMap<i64, f64> = [(-3, 0.5), (-1, 1.25), (0, 2.0), (2, 0.75), (4, 1.0)].into();
        let h = h_spectrum(&m, 2, 16).unwrap();
        let naive = h_naive(&m);
        assert_eq!(h.values.len(), naive.len());
        for (tau, v) in naive {
            assert!(rel(h.get(tau), v) < 1e-12, "tau {tau}");
        }
    }

    #[test]
    fn block_averages() {
        let delta: BTreeMap<i64, f64> = [(0, 1.0)].into();
        let h = h_spectrum(&delta, 1, 16).unwrap();
        for k in [1.0, 2.0, 5.0] {
            assert_eq!(dyadic_block_average(&h, k).unwrap(), 0.0);
        }
        let k = 6u64;
        let flat = HSpectrum { n: 4, values: (0..40).map(|t| (t, if (k..=2 * k).contains(&t) { 1.0 } else { 0.0 })).collect() };
        assert_eq!(dyadic_block_average(&flat, k as f64).unwrap(), (k + 1) as f64 / k as f64);
        assert!(dyadic_block_average(&flat, 0.5).is_err());

        let m: BTreeMap<i64, f64> = (0..=4).map(|k| (k, 1.0)).collect();
        let h = h_spectrum(&m, 2, 16).unwrap();
        let naive = h_naive(&m);
        let expect: f64 = naive.range(4..=8).map(|(_, v)| v).sum::<f64>() / 4.0;
        assert_eq!(dyadic_block_average(&h, 4.0).unwrap(), expect);
    }

    #[test]
    fn h_is_conjugation_invariant() {
        // Conjugating u maps f̂(k) to conj f̂(-k); magnitudes reflect.
        let m: BTreeMap<i64, f64> = [(-2, 0.3), (1, 1.0), (3, 0.6)].into();
        let r: BTreeMap<i64, f64> = m.iter().map(|(&k, &v)| (-k, v)).collect();
        let (a, b) = (h_spectrum(&m, 2, 16).unwrap(), h_spectrum(&r, 2, 16).unwrap());
        assert_eq!(a.values.len(), b.values.len());
        for (tau, v) in &a.values {
            assert!(rel(b.get(*tau), *v) < 1e-13);
        }
    }

    #[test]
    fn scan_closed_forms() {
        let single = FourierState::from_hat(1.0, [(0, c(2.0))]).unwrap();
        let n = 16f64;
        let t = n.powf(-0.7);
        let r = l6_time_integral_exact(&single, t, 8).unwrap().powf(1.0 / 6.0) / single.l2_norm();
        assert!(rel(r, (2.0 * PI * t).powf(1.0 / 6.0) / (2.0 * PI).sqrt()) < 1e-12);

        let two = FourierState::from_hat(1.0, [(0, c(1.0)), (1, c(1.0))]).unwrap();
        let r = l6_time_integral_exact(&two, 1.0, 8).unwrap().powf(1.0 / 6.0) / two.l2_norm();
        assert!(rel(r, (40.0 * PI).powf(1.0 / 6.0) / (4.0 * PI).sqrt()) < 1e-12);

        let scan = strichartz_scan(0.7, &[4, 8], &Ensemble { random_members: 2, constant_profile: true }, 1).unwrap();
        assert_eq!(scan.records.len(), 6);
        assert_eq!(scan.maxima.len(), 2);
        assert!(strichartz_scan(0.7, &[], &Ensemble { random_members: 1, constant_profile: false }, 1).is_err());
        assert!(strichartz_scan(0.7, &[6], &Ensemble { random_members: 1, constant_profile: false }, 1).is_err());
    }

    #[test]
    fn scans_are_deterministic() {
        let e = Ensemble { random_members: 3, constant_profile: false };
        assert_eq!(strichartz_scan(0.7, &[4], &e, 11).unwrap(), strichartz_scan(0.7, &[4], &e, 11).unwrap());
    }

    #[test]
    fn chain_ratio_is_finite() {
        for rec in chain_scan(&[4], 0.7, 2, 3).unwrap() {
            assert!(rec.ratio.is_finite() && rec.ratio > 0.0);
        }
    }
}
