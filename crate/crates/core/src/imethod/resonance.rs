use serde::{Deserialize, Serialize};

use super::multiplier::MultiplierParams;
use super::tuple::{dyadic_class, rearrange_decreasing, FreqTuple};
use crate::error::{Error, Result};

/// Constants behind `∼` (within a factor `c_sim`) and `≫` (at least `c_gg` times).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub c_sim: f64,
    pub c_gg: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { c_sim: 2.0, c_gg: 8.0 }
    }
}

impl Thresholds {
    pub fn sim(&self, a: f64, b: f64) -> bool {
        a.max(b) <= self.c_sim * a.min(b)
    }

    pub fn gg(&self, a: f64, b: f64) -> bool {
        a >= self.c_gg * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResonanceKind {
    ResonantI,
    ResonantIia,
    ResonantIib,
    ResonantIic,
    ResonantIii,
    NonResonant,
}

impl ResonanceKind {
    pub fn is_resonant(self) -> bool {
        self != ResonanceKind::NonResonant
    }

    /// Kind of the conjugate tuple; the two mirror-image subcases of (ii) trade places.
    pub fn conjugate(self) -> Self {
        match self {
            ResonanceKind::ResonantIib => ResonanceKind::ResonantIic,
            ResonanceKind::ResonantIic => ResonanceKind::ResonantIib,
            k => k,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ResonanceKind::ResonantI => "i",
            ResonanceKind::ResonantIia => "ii-a",
            ResonanceKind::ResonantIib => "ii-b",
            ResonanceKind::ResonantIic => "ii-c",
            ResonanceKind::ResonantIii => "iii",
            ResonanceKind::NonResonant => "non-resonant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonanceVerdict {
    pub kind: ResonanceKind,
    /// Comparisons that decided the verdict, in evaluation order.
    pub witness: Vec<String>,
    /// Frequencies in canonical order.
    pub ks: [f64; 6],
    /// Dyadic classes `N_j` in canonical order.
    pub classes: [f64; 6],
    /// The classes sorted nonincreasing.
    pub starred: [f64; 6],
}

/// Canonical order of a sextic tuple.
///
/// Odd and even slots are sorted separately by decreasing magnitude. Ties go to
/// the larger value in odd slots and to the smaller value in even slots, so the
/// order commutes with the swap `(k_odd, k_even) ↦ (−k_even, −k_odd)` that
/// complex conjugation induces.
pub fn canonical_order(t: &FreqTuple) -> Result<[f64; 6]> {
    if t.len() != 6 {
        return Err(Error::invalid(format!("expected a sextic tuple, got length {}", t.len())));
    }
    let mut odd: Vec<i64> = t.js.iter().step_by(2).copied().collect();
    let mut even: Vec<i64> = t.js.iter().skip(1).step_by(2).copied().collect();
    odd.sort_by(|a, b| b.abs().cmp(&a.abs()).then(b.cmp(a)));
    even.sort_by(|a, b| b.abs().cmp(&a.abs()).then(a.cmp(b)));
    let l = t.lambda as f64;
    let mut out = [0.0; 6];
    for i in 0..3 {
        out[2 * i] = odd[i] as f64 / l;
        out[2 * i + 1] = even[i] as f64 / l;
    }
    Ok(out)
}

/// `Υ₆`: the two largest frequencies are comparable and exceed `N`.
pub fn in_upsilon6(t: &FreqTuple, p: &MultiplierParams, th: &Thresholds) -> bool {
    if t.len() != 6 || !t.on_gamma() {
        return false;
    }
    let ks: Vec<f64> = (0..6).map(|i| t.k(i)).collect();
    let Ok(star) = rearrange_decreasing(&ks) else { return false };
    dyadic_class(star[0].magnitude) <= th.c_sim * dyadic_class(star[1].magnitude) && star[1].magnitude > p.big_n()
}

/// First matching resonance case on `Γ₆ ∩ Υ₆`.
pub fn classify_resonance(t: &FreqTuple, p: &MultiplierParams, th: &Thresholds) -> Result<ResonanceVerdict> {
    if t.len() != 6 {
        return Err(Error::invalid(format!("expected a sextic tuple, got length {}", t.len())));
    }
    if !t.on_gamma() {
        return Err(Error::invalid(format!("tuple {t} is not on the zero-sum hyperplane")));
    }
    if !in_upsilon6(t, p, th) {
        return Err(Error::invalid(format!("tuple {t} is outside the high-high region for N = {}", p.n)));
    }
    let ks = canonical_order(t)?;
    let classes = ks.map(dyadic_class);
    let mut starred = classes;
    starred.sort_by(|a, b| b.total_cmp(a));
    let n = starred;
    let mut witness = Vec::new();
    let done = |kind, witness| Ok(ResonanceVerdict { kind, witness, ks, classes, starred });

    let (k1, k2) = (ks[0], ks[1]);
    let sum12 = (k1 + k2).abs();
    let case_i = th.sim(n[0], n[1])
        && th.gg(n[1], n[2])
        && th.sim(n[2], n[3])
        && k1 * k2 < 0.0
        && th.c_gg * sum12 <= n[2] * n[2] / n[0];
    if case_i {
        witness.push(format!("N1*~N2* ({}, {})", n[0], n[1]));
        witness.push(format!("N2*>>N3* ({}, {})", n[1], n[2]));
        witness.push(format!("N3*~N4* ({}, {})", n[2], n[3]));
        witness.push(format!("k1*k2<0, |k1+k2|={sum12} <= (N3*)^2/(c_gg N1*)"));
        return done(ResonanceKind::ResonantI, witness);
    }

    if th.sim(n[0], n[3]) && th.gg(n[3], n[4]) {
        witness.push(format!("N1*~N4* ({}, {})", n[0], n[3]));
        witness.push(format!("N4*>>N5* ({}, {})", n[3], n[4]));
        let high: Vec<usize> = (0..6).filter(|&i| classes[i] >= n[3]).map(|i| i + 1).collect();
        let close = |anchor: f64, others: &[usize]| {
            let signs: Vec<bool> = others.iter().map(|&i| ks[i - 1] > 0.0).collect();
            let mixed = signs.iter().any(|&s| s != signs[0]);
            mixed
                && others.iter().all(|&i| {
                    let ki = ks[i - 1];
                    let d = if ki * anchor > 0.0 { anchor - ki } else { anchor + ki };
                    th.sim(dyadic_class(d), n[0])
                })
        };
        let kind = match high.as_slice() {
            [1, 2, 3, 4] => Some(ResonanceKind::ResonantIia),
            [1, 2, 4, 6] if close(k1, &[2, 4, 6]) => Some(ResonanceKind::ResonantIib),
            [1, 2, 3, 5] if close(k2, &[1, 3, 5]) => Some(ResonanceKind::ResonantIic),
            _ => None,
        };
        if let Some(kind) = kind {
            witness.push(format!("high slots {high:?}"));
            return done(kind, witness);
        }
        witness.clear();
    }

    if th.sim(n[0], n[4]) {
        witness.push(format!("N1*~N5* ({}, {})", n[0], n[4]));
        return done(ResonanceKind::ResonantIii, witness);
    }
    witness.push(format!("no case applies to N* = {n:?}, |k1+k2| = {sum12}"));
    done(ResonanceKind::NonResonant, witness)
}
