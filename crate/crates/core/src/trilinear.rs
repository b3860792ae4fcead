//! Counting the resonant set `A` of the trilinear estimate and measuring
//! trilinear `L²` ratios.
//!
//! All frequencies live in `(1/λ)ℤ` and are stored as scaled integers
//! `λn`. Shell conditions `|τ − Σnᵢ²| ≤ c` become `|λ²τ − Σ(λnᵢ)²| ≤ λ²c`.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::FourierState;
use crate::lattice::{fmt_rat, int, Rational};
use crate::rng::{stream, stream_id};
use crate::strichartz::{ls_slope, triple_product_integral};

/// Default cap on the number of candidate pairs in one count.
pub const DEFAULT_PAIR_CAP: u64 = 50_000_000;
/// Default `≪` factor: `a ≪ b` iff `a ≤ b/8`.
pub const DEFAULT_GG: i64 = 8;

/// Closed interval `[lo/λ, hi/λ]` stored by its scaled endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaledInterval {
    pub lo: i64,
    pub hi: i64,
}

impl ScaledInterval {
    fn contains(&self, x: i64) -> bool {
        self.lo <= x && x <= self.hi
    }

    fn points(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrilinearSpec {
    pub lambda: i64,
    pub intervals: [ScaledInterval; 3],
    pub n13: Rational,
    pub n23: Rational,
    pub c_tol: Rational,
    pub j: Rational,
}

impl TrilinearSpec {
    /// Builds a spec from real-unit endpoints, each of which must lie in `(1/λ)ℤ`.
    pub fn new(
        lambda: i64,
        intervals: [(Rational, Rational); 3],
        n13: Rational,
        n23: Rational,
        c_tol: Rational,
        j: Rational,
    ) -> Result<Self> {
        if lambda < 1 {
            return Err(Error::invalid(format!("lambda must be a positive integer, got {lambda}")));
        }
        let scale = |e: Rational| -> Result<i64> {
            let s = e * int(lambda);
            if s.is_integer() {
                Ok(s.to_integer())
            } else {
                Err(Error::invalid(format!("endpoint {} is not in (1/{lambda})Z", fmt_rat(&e))))
            }
        };
        let mut scaled = [ScaledInterval { lo: 0, hi: 0 }; 3];
        for (slot, (lo, hi)) in scaled.iter_mut().zip(intervals) {
            if lo > hi {
                return Err(Error::invalid("interval endpoints are reversed"));
            }
            *slot = ScaledInterval { lo: scale(lo)?, hi: scale(hi)? };
        }
        let spec = TrilinearSpec { lambda, intervals: scaled, n13, n23, c_tol, j };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let [a, b, c] = self.intervals.map(|i| i.hi - i.lo);
        if !(a <= b && b <= c) {
            return Err(Error::invalid("intervals must satisfy |I1| <= |I2| <= |I3|"));
        }
        if self.n13.is_negative() || self.n23.is_negative() || self.j.is_negative() {
            return Err(Error::invalid("gaps and containment radius must be nonnegative"));
        }
        if self.c_tol <= Rational::zero() {
            return Err(Error::invalid("shell tolerance must be positive"));
        }
        Ok(())
    }

    /// `|I_i|` in real units.
    pub fn length(&self, i: usize) -> Rational {
        Rational::new(self.intervals[i].hi - self.intervals[i].lo, self.lambda)
    }

    pub fn n_max(&self) -> Rational {
        self.n13.max(self.n23)
    }

    /// The same geometry at another scale; fails if an endpoint leaves `(1/λ')ℤ`.
    pub fn at_scale(&self, lambda: i64) -> Result<Self> {
        let ends = [0, 1, 2].map(|i| {
            (
                Rational::new(self.intervals[i].lo, self.lambda),
                Rational::new(self.intervals[i].hi, self.lambda),
            )
        });
        TrilinearSpec::new(lambda, ends, self.n13, self.n23, self.c_tol, self.j)
    }

    fn thresholds(&self) -> Thresholds {
        let l = int(self.lambda);
        Thresholds {
            g13: (self.n13 * l).ceil().to_integer(),
            g23: (self.n23 * l).ceil().to_integer(),
            width: (self.c_tol * l * l).floor().to_integer(),
        }
    }
}

/// Integer forms of the gap and shell conditions in scaled units.
struct Thresholds {
    g13: i64,
    g23: i64,
    width: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gain {
    pub m: f64,
    pub k: f64,
    pub enhanced: bool,
}

/// `M = |I₁|(J + |I₁|)/N₂₃` and the effective length `K`.
///
/// Enhancement needs `|I₁| ≪ |I₂|` and `M ≪ min(|I₂|, N₂₃)`, with `a ≪ b` meaning `gg·a ≤ b`.
pub fn enhanced_gain_k(spec: &TrilinearSpec, gg: i64) -> Result<Gain> {
    Ok(gain_exact(spec, gg)?.0)
}

fn gain_exact(spec: &TrilinearSpec, gg: i64) -> Result<(Gain, Rational)> {
    if spec.n23 <= Rational::zero() {
        return Err(Error::invalid("N23 must be positive"));
    }
    let (l1, l2) = (spec.length(0), spec.length(1));
    let m = l1 * (spec.j + l1) / spec.n23;
    let g = int(gg);
    let enhanced = l1 * g <= l2 && m * g <= l2.min(spec.n23);
    let k = if enhanced { m.max(l1) } else { l2 };
    let f = |r: Rational| r.to_f64().unwrap_or(f64::NAN);
    Ok((Gain { m: f(m), k: f(k), enhanced }, k))
}

fn pair_cap_check(spec: &TrilinearSpec, cap: u64) -> Result<()> {
    let pairs = spec.intervals[0].points().saturating_mul(spec.intervals[1].points());
    if pairs > cap {
        return Err(Error::cap("candidate pairs", pairs, cap));
    }
    Ok(())
}

/// `#A(n, τ)` by brute force over `(n₁, n₂) ∈ I₁ × I₂`.
pub fn count_a_set(spec: &TrilinearSpec, n: Rational, tau: Rational, cap: u64) -> Result<u64> {
    pair_cap_check(spec, cap)?;
    let l = int(spec.lambda);
    let s = n * l;
    if !s.is_integer() {
        return Ok(0);
    }
    let s = s.to_integer();
    let th = spec.thresholds();
    let tau_s = tau * l * l;
    let width = spec.c_tol * l * l;
    let [i1, i2, i3] = spec.intervals;
    let mut count = 0;
    for a in i1.lo..=i1.hi {
        for b in i2.lo..=i2.hi {
            let c = s - a - b;
            if !i3.contains(c) || (a - c).abs() < th.g13 || (b - c).abs() < th.g23 {
                continue;
            }
            if (tau_s - int(a * a + b * b + c * c)).abs() <= width {
                count += 1;
            }
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupCount {
    pub sup: u64,
    /// `(λn, λ²τ)` at the maximizer.
    pub argmax: (i64, i64),
    pub normalized: f64,
    pub gain: Gain,
}

/// Largest `#A` over all reachable `n` and integer `λ²τ`, normalized by `λ²K/N_max + λ`.
pub fn sup_count_a(spec: &TrilinearSpec, gg: i64, cap: u64) -> Result<SupCount> {
    pair_cap_check(spec, cap)?;
    let (gain, k) = gain_exact(spec, gg)?;
    let th = spec.thresholds();
    let [i1, i2, i3] = spec.intervals;
    let sums: Vec<i64> = (i1.lo + i2.lo + i3.lo..=i1.hi + i2.hi + i3.hi).collect();
    let best = sums
        .par_iter()
        .map(|&s| {
            let mut values = Vec::new();
            for a in i1.lo..=i1.hi {
                for b in i2.lo..=i2.hi {
                    let c = s - a - b;
                    if i3.contains(c) && (a - c).abs() >= th.g13 && (b - c).abs() >= th.g23 {
                        values.push(a * a + b * b + c * c);
                    }
                }
            }
            values.sort_unstable();
            // Integer centers x with |x − v| ≤ w: a window [v_i, v_i + 2w] is always attainable.
            let mut best = (0u64, s, 0i64);
            let mut hi = 0;
            for lo in 0..values.len() {
                while hi < values.len() && values[hi] - values[lo] <= 2 * th.width {
                    hi += 1;
                }
                let cnt = (hi - lo) as u64;
                if cnt > best.0 {
                    best = (cnt, s, values[lo] + th.width);
                }
            }
            best
        })
        .reduce(|| (0, 0, 0), |x, y| if y.0 > x.0 || (y.0 == x.0 && x.0 > 0 && y.1 < x.1) { y } else { x });
    let l = int(spec.lambda);
    let denom = l * l * k / spec.n_max() + l;
    let normalized = if best.0 == 0 { 0.0 } else { (int(best.0 as i64) / denom).to_f64().unwrap_or(f64::NAN) };
    Ok(SupCount { sup: best.0, argmax: (best.1, best.2), normalized, gain })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub geometry: String,
    pub lambda: i64,
    pub sup: u64,
    pub k: f64,
    pub enhanced: bool,
    pub normalized: f64,
}

/// A named geometry in real units.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    pub name: String,
    pub spec: TrilinearSpec,
}

/// The three standard geometries: two unenhanced and one in the enhanced regime.
pub fn standard_geometries() -> Vec<Geometry> {
    let r = |n: i64, d: i64| Rational::new(n, d);
    let mk = |name: &str, iv: [(i64, i64, i64); 3], n13: i64, n23: i64, j: i64| {
        // (lo, hi, denominator)
        let ends = iv.map(|(lo, hi, d)| (r(lo, d), r(hi, d)));
        Geometry {
            name: name.to_string(),
            spec: TrilinearSpec::new(2, ends, int(n13), int(n23), int(1), int(j)).expect("standard geometry"),
        }
    };
    vec![
        mk("separated", [(0, 1, 1), (2, 4, 1), (20, 24, 1)], 16, 14, 24),
        mk("opposed", [(0, 2, 1), (-8, -4, 1), (16, 24, 1)], 14, 20, 24),
        mk("thin-first", [(0, 1, 2), (-8, 0, 1), (30, 38, 1)], 29, 30, 38),
    ]
}

/// Per-geometry least-squares slope of `ln normalized` against `ln λ`.
pub type GeometrySlope = (String, f64);

/// Normalized suprema across scales, with the least-squares slope against `ln λ` per geometry.
pub fn trilinear_scale_scan(
    geometries: &[Geometry],
    lambdas: &[i64],
    gg: i64,
    cap: u64,
) -> Result<(Vec<ScaleRecord>, Vec<GeometrySlope>)> {
    let mut records = Vec::new();
    let mut slopes = Vec::new();
    for g in geometries {
        let mut pts = Vec::new();
        for &lambda in lambdas {
            let spec = g.spec.at_scale(lambda)?;
            let sc = sup_count_a(&spec, gg, cap)?;
            pts.push(((lambda as f64).ln(), sc.normalized));
            records.push(ScaleRecord {
                geometry: g.name.clone(),
                lambda,
                sup: sc.sup,
                k: sc.gain.k,
                enhanced: sc.gain.enhanced,
                normalized: sc.normalized,
            });
        }
        slopes.push((g.name.clone(), ls_slope(&pts)));
    }
    Ok((records, slopes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UvReport {
    pub samples: usize,
    pub max_abs_residual: String,
    pub all_zero: bool,
}

type Big = Ratio<i128>;

fn uv_residual(x: Big, y: Big, at: Big, bt: Big, lambda: Big) -> Big {
    let lhs = x * x + y * y + x * y + lambda * (x * at + y * bt);
    let (u, v) = (x - y, x + y);
    let (a, b) = (at - bt, (at + bt) / Big::from_integer(3));
    let q = Big::new(1, 4);
    let rhs = q * (u + lambda * a) * (u + lambda * a) + Big::new(3, 4) * (v + lambda * b) * (v + lambda * b)
        - q * lambda * lambda * a * a
        - Big::new(3, 4) * lambda * lambda * b * b;
    lhs - rhs
}

/// Checks the `(u, v)` completion of squares on exact rationals.
pub fn uv_change_of_variables_check(samples: usize, seed: u64) -> UvReport {
    let mut rng = stream(seed, stream_id(0x7576, 0));
    let mut worst = Big::zero();
    for _ in 0..samples {
        let mut draw = |positive: bool| {
            let d: i128 = rng.gen_range(1..=24);
            let n: i128 = if positive { rng.gen_range(1..=200) } else { rng.gen_range(-200..=200) };
            Big::new(n, d)
        };
        let (x, y, at, bt, l) = (draw(false), draw(false), draw(false), draw(false), draw(true));
        let r = uv_residual(x, y, at, bt, l).abs();
        if r > worst {
            worst = r;
        }
    }
    UvReport { samples, max_abs_residual: worst.to_string(), all_zero: worst.is_zero() }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L2Ratio {
    pub product_norm: f64,
    pub data_norms: f64,
    pub ratio: f64,
    /// `(1/λ + K/N_max)^{1/2}`.
    pub bound_scale: f64,
}

/// `‖∏ e^{itΔ}φⱼ‖_{L²([0,T]×λ𝕋)} / ∏‖φⱼ‖`, checked against the supports of `spec`.
pub fn trilinear_l2_ratio(
    phis: [&FourierState; 3],
    spec: &TrilinearSpec,
    t: f64,
    support_cap: usize,
) -> Result<L2Ratio> {
    for (i, phi) in phis.iter().enumerate() {
        if phi.is_empty() {
            return Err(Error::invalid(format!("phi_{} is zero", i + 1)));
        }
        if phi.lambda() != spec.lambda as f64 {
            return Err(Error::invalid("state scale differs from the spec"));
        }
        let iv = spec.intervals[i];
        if phi.amplitudes().any(|(j, _)| !iv.contains(j)) {
            return Err(Error::invalid(format!("phi_{} is not supported in I{}", i + 1, i + 1)));
        }
    }
    let integral = triple_product_integral(phis, t, support_cap)?;
    let product_norm = integral.max(0.0).sqrt();
    let data_norms: f64 = phis.iter().map(|p| p.l2_norm()).product();
    let gain = enhanced_gain_k(spec, DEFAULT_GG)?;
    let n_max = spec.n_max().to_f64().unwrap_or(f64::NAN);
    let bound_scale = (1.0 / spec.lambda as f64 + gain.k / n_max).sqrt();
    Ok(L2Ratio { product_norm, data_norms, ratio: product_norm / data_norms, bound_scale })
}

/// Gaussian states on the three intervals of `spec`; returns `ratio / bound_scale` per member.
pub fn trilinear_ratio_scan(spec: &TrilinearSpec, members: usize, t: f64, seed: u64, support_cap: usize) -> Result<Vec<f64>> {
    (0..members)
        .into_par_iter()
        .map(|m| {
            let states: Vec<FourierState> = (0..3)
                .map(|i| {
                    let iv = spec.intervals[i];
                    let mut rng = stream(seed, stream_id(spec.lambda as u64 * 4 + i as u64, m as u64));
                    FourierState::random_gaussian(spec.lambda as f64, iv.lo..=iv.hi, &mut rng)
                })
                .collect::<Result<_>>()?;
            let r = trilinear_l2_ratio([&states[0], &states[1], &states[2]], spec, t, support_cap)?;
            Ok(r.ratio / r.bound_scale)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn spec1(lambda: i64, iv: [(i64, i64); 3], n13: Rational, n23: Rational, c_tol: Rational) -> TrilinearSpec {
        TrilinearSpec::new(lambda, iv.map(|(a, b)| (int(a), int(b))), n13, n23, c_tol, int(0)).unwrap()
    }

    fn derived() -> TrilinearSpec {
        spec1(1, [(0, 2), (4, 6), (16, 18)], int(10), int(10), int(1))
    }

    /// Triple loop with every condition checked in real units.
    fn naive(spec: &TrilinearSpec, n: Rational, tau: Rational) -> u64 {
        let l = spec.lambda;
        let iv = |i: usize| (Rational::new(spec.intervals[i].lo, l), Rational::new(spec.intervals[i].hi, l));
        let pts = |i: usize| (spec.intervals[i].lo..=spec.intervals[i].hi).map(move |x| Rational::new(x, l));
        let mut count = 0;
        for n1 in pts(0) {
            for n2 in pts(1) {
                for n3 in pts(2) {
                    let (lo, hi) = iv(2);
                    if n1 + n2 + n3 != n || n3 < lo || n3 > hi {
                        continue;
                    }
                    if (n1 - n3).abs() < spec.n13 || (n2 - n3).abs() < spec.n23 {
                        continue;
                    }
                    if (tau - n1 * n1 - n2 * n2 - n3 * n3).abs() <= spec.c_tol {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn gain_examples() {
        let mk = |l1: i64, l2: i64, j: i64, n23: i64| {
            TrilinearSpec::new(
                1,
                [(int(0), int(l1)), (int(0), int(l2)), (int(0), int(l2.max(1) * 4))],
                int(1),
                int(n23),
                int(1),
                int(j),
            )
            .unwrap()
        };
        let g = enhanced_gain_k(&mk(2, 40, 100, 50), 8).unwrap();
        assert!((g.m - 4.08).abs() < 1e-15);
        let g = enhanced_gain_k(&mk(0, 4, 100, 50), 8).unwrap();
        assert_eq!((g.m, g.k, g.enhanced), (0.0, 0.0, true));
        let g = enhanced_gain_k(&mk(4, 4, 1, 50), 8).unwrap();
        assert!(!g.enhanced);
        assert_eq!(g.k, 4.0);
        assert!(enhanced_gain_k(&mk(1, 4, 1, 0), 8).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(TrilinearSpec::new(2, [(rat(1, 3), int(1)), (int(0), int(2)), (int(0), int(3))], int(1), int(1), int(1), int(0)).is_err());
        assert!(TrilinearSpec::new(1, [(int(0), int(3)), (int(0), int(2)), (int(0), int(3))], int(1), int(1), int(1), int(0)).is_err());
        assert!(TrilinearSpec::new(1, [(int(0), int(1)), (int(0), int(2)), (int(0), int(3))], int(1), int(1), int(0), int(0)).is_err());
    }

    #[test]
    fn derived_count() {
        let s = derived();
        assert_eq!(count_a_set(&s, int(22), int(340), DEFAULT_PAIR_CAP).unwrap(), 1);
        assert_eq!(naive(&s, int(22), int(340)), 1);
        assert_eq!(count_a_set(&s, int(22), int(100), DEFAULT_PAIR_CAP).unwrap(), 0);
        let sc = sup_count_a(&s, 8, DEFAULT_PAIR_CAP).unwrap();
        assert!(sc.sup >= 1);
        assert!(count_a_set(&s, int(22), int(340), 2).unwrap_err().is_cap());
    }

    #[test]
    fn refinement_adds_candidates() {
        let s1 = derived();
        let s2 = s1.at_scale(2).unwrap();
        for (n, tau) in [(22, 340), (23, 360), (21, 300)] {
            assert!(count_a_set(&s2, int(n), int(tau), DEFAULT_PAIR_CAP).unwrap() >= count_a_set(&s1, int(n), int(tau), DEFAULT_PAIR_CAP).unwrap());
        }
    }

    #[test]
    fn empty_intersection() {
        // n3 can never reach I3 from these n.
        let s = derived();
        assert_eq!(count_a_set(&s, int(5), int(30), DEFAULT_PAIR_CAP).unwrap(), 0);
        let far = spec1(1, [(0, 1), (0, 1), (0, 2)], int(50), int(50), int(1));
        let sc = sup_count_a(&far, 8, DEFAULT_PAIR_CAP).unwrap();
        assert_eq!((sc.sup, sc.normalized), (0, 0.0));
    }

    #[test]
    fn oracle_equivalence_and_symmetries() {
        let mut rng = stream(17, 0);
        for _ in 0..40 {
            let lambda = rng.gen_range(1..=3);
            let lo1 = rng.gen_range(-6..=6);
            let w1 = rng.gen_range(0..=3);
            let lo2 = rng.gen_range(-10..=10);
            let w2 = w1 + rng.gen_range(0..=3);
            let lo3 = rng.gen_range(-12..=12);
            let w3 = w2 + rng.gen_range(0..=3);
            let iv = [(lo1, lo1 + w1), (lo2, lo2 + w2), (lo3, lo3 + w3)];
            let ctol = rat(rng.gen_range(1..=8), rng.gen_range(1..=4));
            let s = TrilinearSpec::new(
                lambda,
                iv.map(|(a, b)| (Rational::new(a, lambda), Rational::new(b, lambda))),
                rat(rng.gen_range(0..=6), lambda),
                rat(rng.gen_range(0..=6), lambda),
                ctol,
                int(0),
            )
            .unwrap();
            let flipped = TrilinearSpec::new(
                lambda,
                iv.map(|(a, b)| (Rational::new(-b, lambda), Rational::new(-a, lambda))),
                s.n13,
                s.n23,
                s.c_tol,
                int(0),
            )
            .unwrap();
            let n = Rational::new(rng.gen_range(lo1 + lo2 + lo3..=lo1 + lo2 + lo3 + w1 + w2 + w3), lambda);
            let tau = Rational::new(rng.gen_range(0..=400), lambda * lambda);
            let c = count_a_set(&s, n, tau, DEFAULT_PAIR_CAP).unwrap();
            assert_eq!(c, naive(&s, n, tau));
            assert_eq!(c, count_a_set(&flipped, -n, tau, DEFAULT_PAIR_CAP).unwrap());
            let mut wider = s.clone();
            wider.c_tol = s.c_tol * int(2);
            assert!(count_a_set(&wider, n, tau, DEFAULT_PAIR_CAP).unwrap() >= c);
        }
    }

    #[test]
    fn sup_matches_grid_search() {
        let s = spec1(2, [(0, 1), (2, 4), (9, 12)], int(4), int(3), int(2));
        let sc = sup_count_a(&s, 8, DEFAULT_PAIR_CAP).unwrap();
        let [i1, i2, i3] = s.intervals;
        let mut best = 0;
        for sn in i1.lo + i2.lo + i3.lo..=i1.hi + i2.hi + i3.hi {
            for ts in 0..=4 * 600 {
                best = best.max(count_a_set(&s, Rational::new(sn, 2), Rational::new(ts, 4), DEFAULT_PAIR_CAP).unwrap());
            }
        }
        assert_eq!(sc.sup, best);
        let (n, t) = sc.argmax;
        assert_eq!(count_a_set(&s, Rational::new(n, 2), Rational::new(t, 4), DEFAULT_PAIR_CAP).unwrap(), best);
    }

    #[test]
    fn uv_identity() {
        let z = Big::zero();
        assert!(uv_residual(z, z, Big::new(3, 1), Big::new(-2, 7), Big::new(5, 1)).is_zero());
        let i = |n| Big::from_integer(n);
        assert!(uv_residual(i(1), i(2), i(3), i(4), i(5)).is_zero());
        let rep = uv_change_of_variables_check(1000, 4);
        assert!(rep.all_zero);
        assert_eq!(rep.max_abs_residual, "0");
    }

    #[test]
    fn single_mode_ratio() {
        let s = spec1(2, [(0, 1), (2, 4), (20, 24)], int(16), int(14), int(1));
        let a = [Complex64::new(1.5, 0.0), Complex64::new(0.0, -0.5), Complex64::new(0.3, 0.4)];
        let phis: Vec<FourierState> = [1i64, 5, 44]
            .iter()
            .zip(a)
            .map(|(&j, c)| FourierState::from_hat(2.0, [(j, c)]).unwrap())
            .collect();
        let t = 0.7;
        let r = trilinear_l2_ratio([&phis[0], &phis[1], &phis[2]], &s, t, 16).unwrap();
        // |∏u| = ∏|c_j|/λ^{3/2} is constant in space and time.
        let lambda = 2.0f64;
        let expect = (t / (2.0 * PI * lambda).powi(2)).sqrt();
        assert!((r.ratio - expect).abs() < 1e-13 * expect);
        let m = 256;
        let dx = 2.0 * PI * lambda / m as f64;
        let u: Vec<FourierState> = phis.iter().map(|p| p.evolve_linear(0.3)).collect();
        let quad: f64 = (0..m).map(|i| {
            let x = i as f64 * dx;
            (u[0].eval(x) * u[1].eval(x) * u[2].eval(x)).norm_sqr()
        }).sum::<f64>() * dx * t;
        assert!((quad.sqrt() - r.product_norm).abs() < 1e-12 * r.product_norm);
        let zero = FourierState::new(2.0).unwrap();
        assert!(trilinear_l2_ratio([&zero, &phis[1], &phis[2]], &s, t, 16).is_err());
    }

    #[test]
    fn standard_suite_is_well_formed() {
        let g = standard_geometries();
        assert!(!enhanced_gain_k(&g[0].spec, 8).unwrap().enhanced);
        assert!(enhanced_gain_k(&g[2].spec, 8).unwrap().enhanced);
        let (recs, slopes) = trilinear_scale_scan(&g, &[2, 4], 8, DEFAULT_PAIR_CAP).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(slopes.len(), 3);
        assert!(recs.iter().all(|r| r.sup > 0));
        let ratios = trilinear_ratio_scan(&g[0].spec, 3, 1.0, 2, 64).unwrap();
        assert!(ratios.iter().all(|r| r.is_finite() && *r > 0.0));
    }
}
