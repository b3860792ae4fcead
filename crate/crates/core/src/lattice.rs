//! Exact lattice point counting for rank-2 lattices in shifted disks and annuli.
//!
//! A lattice is described by the Gram form of a basis, so a count over basis
//! coordinates `(x, y) ∈ ℤ²` under `Q(x, y)` is the same as a count of lattice
//! vectors by Euclidean length. Every boundary decision is made in integer
//! arithmetic after clearing denominators; floating point is only used to
//! guess row endpoints, which are then corrected with the exact predicate.

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;

pub type Rational = Ratio<i64>;

pub fn rat(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Ratio::from_integer(n)
}

/// Dyadic rational nearest to `x` with denominator `2^bits`.
pub fn dyadic(x: f64, bits: u32) -> Rational {
    let scale = (1i64 << bits) as f64;
    Ratio::new((x * scale).round() as i64, 1i64 << bits)
}

pub(crate) fn fmt_rat(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Positive-definite binary quadratic form `a x² + b xy + c y²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm2 {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl QuadraticForm2 {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        let form = QuadraticForm2 { a, b, c };
        if !form.a.is_positive() || !form.discriminant4().is_positive() {
            return Err(Error::invalid(format!(
                "form {form} is not positive definite (need a > 0 and 4ac - b^2 > 0)"
            )));
        }
        Ok(form)
    }

    /// `x² + y²`.
    pub fn unit() -> Self {
        QuadraticForm2 { a: int(1), b: int(0), c: int(1) }
    }

    /// `x² + xy + y²`, the Gram form of the triangular lattice.
    pub fn hexagonal() -> Self {
        QuadraticForm2 { a: int(1), b: int(1), c: int(1) }
    }

    pub fn a(&self) -> Rational {
        self.a
    }

    pub fn b(&self) -> Rational {
        self.b
    }

    pub fn c(&self) -> Rational {
        self.c
    }

    /// `4ac − b²`.
    pub fn discriminant4(&self) -> Rational {
        int(4) * self.a * self.c - self.b * self.b
    }

    pub fn eval(&self, x: Rational, y: Rational) -> Rational {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn scaled(&self, k: Rational) -> Result<Self> {
        QuadraticForm2::new(self.a * k, self.b * k, self.c * k)
    }

    /// Area of `{Q ≤ r}`, namely `2πr / √(4ac − b²)`.
    pub fn disk_area(&self, r: f64) -> f64 {
        2.0 * std::f64::consts::PI * r / to_f64(&self.discriminant4()).sqrt()
    }

    /// Integral automorphisms of the form (entries bounded by 2, which covers
    /// every reduced form used here).
    pub fn automorphisms(&self) -> Vec<[[i64; 2]; 2]> {
        let mut out = Vec::new();
        for p in -2..=2 {
            for q in -2..=2 {
                for r in -2..=2 {
                    for s in -2..=2 {
                        if (p * s - q * r).abs() != 1 {
                            continue;
                        }
                        // Q(p x + q y, r x + s y) == Q(x, y)
                        let (pp, qq, rr, ss) = (int(p), int(q), int(r), int(s));
                        let a2 = self.a * pp * pp + self.b * pp * rr + self.c * rr * rr;
                        let c2 = self.a * qq * qq + self.b * qq * ss + self.c * ss * ss;
                        let b2 = int(2) * self.a * pp * qq
                            + self.b * (pp * ss + qq * rr)
                            + int(2) * self.c * rr * ss;
                        if a2 == self.a && b2 == self.b && c2 == self.c {
                            out.push([[p, q], [r, s]]);
                        }
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for QuadraticForm2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})x^2 + ({})xy + ({})y^2",
            fmt_rat(&self.a),
            fmt_rat(&self.b),
            fmt_rat(&self.c)
        )
    }
}

/// Rank-2 lattice basis with exact coordinates.
///
/// Coordinate axis `i` carries a positive integer radicand `d_i`: the actual
/// coordinate is `stored · √d_i`. This keeps bases such as `(1,0), (1/2, √3/2)`
/// exact, since the Gram form only needs `x₁x₂·d_x + y₁y₂·d_y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeBasis2 {
    pub v1: [Rational; 2],
    pub v2: [Rational; 2],
    pub radicands: [i64; 2],
}

impl LatticeBasis2 {
    pub fn new(v1: [Rational; 2], v2: [Rational; 2], radicands: [i64; 2]) -> Result<Self> {
        if radicands.iter().any(|&d| d <= 0) {
            return Err(Error::invalid("coordinate radicands must be positive"));
        }
        if (v1[0] * v2[1] - v1[1] * v2[0]).is_zero() {
            return Err(Error::invalid("degenerate lattice basis (zero determinant)"));
        }
        Ok(LatticeBasis2 { v1, v2, radicands })
    }

    pub fn square() -> Self {
        LatticeBasis2 { v1: [int(1), int(0)], v2: [int(0), int(1)], radicands: [1, 1] }
    }

    /// `(1, 0), (1/2, √3/2)`.
    pub fn hexagonal() -> Self {
        LatticeBasis2 { v1: [int(1), int(0)], v2: [rat(1, 2), rat(1, 2)], radicands: [1, 3] }
    }

    fn dot(&self, u: &[Rational; 2], w: &[Rational; 2]) -> Rational {
        u[0] * w[0] * int(self.radicands[0]) + u[1] * w[1] * int(self.radicands[1])
    }
}

/// Gram form `Q(x, y) = |x·v1 + y·v2|²` of a basis.
pub fn gram_form(basis: &LatticeBasis2) -> Result<QuadraticForm2> {
    if (basis.v1[0] * basis.v2[1] - basis.v1[1] * basis.v2[0]).is_zero() {
        return Err(Error::invalid("degenerate lattice basis (zero determinant)"));
    }
    QuadraticForm2::new(
        basis.dot(&basis.v1, &basis.v1),
        int(2) * basis.dot(&basis.v1, &basis.v2),
        basis.dot(&basis.v2, &basis.v2),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryMode {
    /// `r1 ≤ Q ≤ r2`
    ClosedClosed,
    /// `r1 ≤ Q < r2`
    ClosedOpen,
}

/// Annulus `r1sq ◁ Q(p − center) ◁ r2sq` in basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnulusSpec {
    pub center: [Rational; 2],
    pub r1sq: Rational,
    pub r2sq: Rational,
    pub mode: BoundaryMode,
}

impl AnnulusSpec {
    pub fn new(center: [Rational; 2], r1sq: Rational, r2sq: Rational, mode: BoundaryMode) -> Result<Self> {
        let spec = AnnulusSpec { center, r1sq, r2sq, mode };
        spec.validate()?;
        Ok(spec)
    }

    /// Closed disk `Q ≤ r2sq` around the origin.
    pub fn disk(r2sq: Rational) -> Self {
        AnnulusSpec { center: [int(0), int(0)], r1sq: int(0), r2sq, mode: BoundaryMode::ClosedClosed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r1sq.is_negative() {
            return Err(Error::invalid("inner squared radius must be nonnegative"));
        }
        if self.r1sq > self.r2sq {
            return Err(Error::invalid(format!(
                "inner squared radius {} exceeds outer {}",
                fmt_rat(&self.r1sq),
                fmt_rat(&self.r2sq)
            )));
        }
        Ok(())
    }
}

/// Integer-scaled form of `Q(x − βx, y − βy)` over integer `(x, y)`.
///
/// With `u = D x − px`, `v = D y − py` the value is `W(u, v) / (E D²)` where
/// `W = A u² + B uv + C v²` has integer coefficients.
struct ScaledForm {
    a: i128,
    b: i128,
    c: i128,
    d: i128,
    px: i128,
    py: i128,
    /// `E · D²`
    scale: i128,
}

/// Threshold `W ◁ num/den` compared as `den·W ◁ num`.
#[derive(Clone, Copy)]
struct Threshold {
    num: i128,
    den: i128,
    strict: bool,
}

impl ScaledForm {
    fn new(form: &QuadraticForm2, center: &[Rational; 2]) -> Self {
        let e = form.a.denom().lcm(form.b.denom()).lcm(form.c.denom()) as i128;
        let d = center[0].denom().lcm(center[1].denom()) as i128;
        let coef = |r: &Rational| *r.numer() as i128 * (e / *r.denom() as i128);
        let shift = |r: &Rational| *r.numer() as i128 * (d / *r.denom() as i128);
        ScaledForm {
            a: coef(&form.a),
            b: coef(&form.b),
            c: coef(&form.c),
            d,
            px: shift(&center[0]),
            py: shift(&center[1]),
            scale: e * d * d,
        }
    }

    fn threshold(&self, r: &Rational, strict: bool) -> Threshold {
        Threshold { num: *r.numer() as i128 * self.scale, den: *r.denom() as i128, strict }
    }

    #[inline]
    fn w(&self, x: i64, v: i128) -> i128 {
        let u = self.d * x as i128 - self.px;
        self.a * u * u + self.b * u * v + self.c * v * v
    }

    #[inline]
    fn inside(&self, x: i64, v: i128, t: Threshold) -> bool {
        let lhs = t.den * self.w(x, v);
        if t.strict {
            lhs < t.num
        } else {
            lhs <= t.num
        }
    }

    /// Number of integers `x` with `W(Dx − px, v) ◁ t` (an interval in `x`).
    fn row_count(&self, v: i128, t: Threshold) -> u64 {
        let (a, b, c, d) = (self.a as f64, self.b as f64, self.c as f64, self.d as f64);
        let vf = v as f64;
        // Convex in x: the integer minimiser is the floor or ceiling of the real one.
        let u_star = -b * vf / (2.0 * a);
        let x_star = (u_star + self.px as f64) / d;
        let x0 = x_star.floor() as i64;
        let seed = if self.inside(x0, v, t) {
            x0
        } else if self.inside(x0 + 1, v, t) {
            x0 + 1
        } else {
            return 0;
        };
        let tf = t.num as f64 / t.den as f64;
        let disc = (b * b * vf * vf - 4.0 * a * (c * vf * vf - tf)).max(0.0);
        let half = disc.sqrt() / (2.0 * a);
        let mut lo = (((u_star - half) + self.px as f64) / d).ceil() as i64;
        let mut hi = (((u_star + half) + self.px as f64) / d).floor() as i64;
        lo = lo.min(seed);
        hi = hi.max(seed);
        while self.inside(lo - 1, v, t) {
            lo -= 1;
        }
        while !self.inside(lo, v, t) {
            lo += 1;
        }
        while self.inside(hi + 1, v, t) {
            hi += 1;
        }
        while !self.inside(hi, v, t) {
            hi -= 1;
        }
        (hi - lo + 1) as u64
    }

    /// Number of lattice points with `Q ◁ r`.
    fn count_below(&self, r: &Rational, strict: bool) -> u64 {
        if r.is_negative() || (strict && r.is_zero()) {
            return 0;
        }
        let t = self.threshold(r, strict);
        // v² ≤ 4A·T / (4AC − B²) bounds the rows.
        let delta = (4 * self.a * self.c - self.b * self.b) as f64;
        let tf = t.num as f64 / t.den as f64;
        let vmax = (4.0 * self.a as f64 * tf / delta).sqrt();
        let y_lo = ((self.py as f64 - vmax) / self.d as f64).floor() as i64 - 1;
        let y_hi = ((self.py as f64 + vmax) / self.d as f64).ceil() as i64 + 1;
        (y_lo..=y_hi)
            .map(|y| self.row_count(self.d * y as i128 - self.py, t))
            .sum()
    }
}

/// `#{(x, y) ∈ ℤ² : r1sq ◁ Q(x − βx, y − βy) ◁ r2sq}`.
pub fn count_points(form: &QuadraticForm2, region: &AnnulusSpec) -> Result<u64> {
    QuadraticForm2::new(form.a, form.b, form.c)?;
    region.validate()?;
    let scaled = ScaledForm::new(form, &region.center);
    let outer = match region.mode {
        BoundaryMode::ClosedClosed => scaled.count_below(&region.r2sq, false),
        BoundaryMode::ClosedOpen => scaled.count_below(&region.r2sq, true),
    };
    let inner = scaled.count_below(&region.r1sq, true);
    Ok(outer - inner)
}

/// Lattice count minus the area of the region.
pub fn gauss_error(form: &QuadraticForm2, region: &AnnulusSpec) -> Result<f64> {
    let count = count_points(form, region)?;
    let area = form.disk_area(to_f64(&region.r2sq)) - form.disk_area(to_f64(&region.r1sq));
    Ok(count as f64 - area)
}

/// Which centers a Hypothesis-H scan visits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterSampling {
    pub origin: bool,
    /// A few nonzero lattice points; counts there must equal the origin's.
    pub lattice_points: bool,
    /// Deep holes `(1/3,1/3)`, `(2/3,2/3)` and edge midpoints of the triangular lattice.
    pub deep_holes: bool,
    /// Uniform samples in the fundamental domain `[0,1)²`.
    pub random: usize,
}

impl Default for CenterSampling {
    fn default() -> Self {
        CenterSampling { origin: true, lattice_points: false, deep_holes: true, random: 64 }
    }
}

/// Denominator exponent used for random centers.
const CENTER_BITS: u32 = 16;
/// Denominator exponent used to rationalise `N^α`.
pub const WIDTH_BITS: u32 = 20;

impl CenterSampling {
    pub fn centers(&self, seed: u64) -> Vec<(String, [Rational; 2])> {
        let mut out = Vec::new();
        if self.origin {
            out.push(("origin".to_string(), [int(0), int(0)]));
        }
        if self.lattice_points {
            for (i, p) in [[1, 0], [0, 1], [-2, 3]].iter().enumerate() {
                out.push((format!("lattice-{i}"), [int(p[0]), int(p[1])]));
            }
        }
        if self.deep_holes {
            out.push(("deep-hole-1".to_string(), [rat(1, 3), rat(1, 3)]));
            out.push(("deep-hole-2".to_string(), [rat(2, 3), rat(2, 3)]));
            out.push(("edge-x".to_string(), [rat(1, 2), int(0)]));
            out.push(("edge-y".to_string(), [int(0), rat(1, 2)]));
            out.push(("edge-xy".to_string(), [rat(1, 2), rat(1, 2)]));
        }
        let mut rng = stream(seed, 0x4345_4e54);
        let den = 1i64 << CENTER_BITS;
        for i in 0..self.random {
            let x = rng.gen_range(0..den);
            let y = rng.gen_range(0..den);
            out.push((format!("random-{i}"), [rat(x, den), rat(y, den)]));
        }
        out
    }
}

/// One `(N, center)` cell of a Hypothesis-H scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRecord {
    pub n: u64,
    pub alpha: f64,
    pub center_id: String,
    pub center: [String; 2],
    pub r1sq: String,
    pub r2sq: String,
    pub count: u64,
    pub normalized: f64,
    pub seed: u64,
}

/// Per-`N` supremum over the sampled centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupremumRecord {
    pub n: u64,
    pub max_count: u64,
    pub max_normalized: f64,
    pub argmax_center: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisScan {
    pub records: Vec<CountRecord>,
    pub suprema: Vec<SupremumRecord>,
}

pub fn is_dyadic(n: u64) -> bool {
    n >= 1 && n.is_power_of_two()
}

/// Exact width `N^α` rounded to a dyadic rational.
pub fn annulus_width(n: u64, alpha: f64) -> Rational {
    dyadic((n as f64).powf(alpha), WIDTH_BITS)
}

/// Counts of the triangular lattice in `[N², N² + N^α]` around each sampled center.
pub fn scan_hypothesis_h(
    alpha: f64,
    n_list: &[u64],
    centers: &CenterSampling,
    seed: u64,
) -> Result<HypothesisScan> {
    if n_list.is_empty() {
        return Err(Error::invalid("N list is empty"));
    }
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(Error::invalid(format!("alpha = {alpha} outside (0, 2)")));
    }
    if let Some(n) = n_list.iter().find(|&&n| !is_dyadic(n)) {
        return Err(Error::invalid(format!("N = {n} is not a power of two")));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n > 1 << 20) {
        return Err(Error::cap("N", n, 1u64 << 20));
    }
    let form = QuadraticForm2::hexagonal();
    let center_list = centers.centers(seed);
    let cells: Vec<(u64, usize)> = n_list
        .iter()
        .flat_map(|&n| (0..center_list.len()).map(move |c| (n, c)))
        .collect();
    let records = cells
        .par_iter()
        .map(|&(n, ci)| {
            let (id, center) = &center_list[ci];
            let n2 = int(n as i64 * n as i64);
            let width = annulus_width(n, alpha);
            let region = AnnulusSpec::new(*center, n2, n2 + width, BoundaryMode::ClosedClosed)?;
            let count = count_points(&form, &region)?;
            Ok(CountRecord {
                n,
                alpha,
                center_id: id.clone(),
                center: [fmt_rat(&center[0]), fmt_rat(&center[1])],
                r1sq: fmt_rat(&region.r1sq),
                r2sq: fmt_rat(&region.r2sq),
                count,
                normalized: count as f64 / (n as f64).powf(alpha),
                seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let suprema = n_list
        .iter()
        .map(|&n| {
            let best = records
                .iter()
                .filter(|r| r.n == n)
                .fold(None::<&CountRecord>, |acc, r| match acc {
                    Some(b) if b.count >= r.count => Some(b),
                    _ => Some(r),
                })
                .expect("at least one center per N");
            SupremumRecord {
                n,
                max_count: best.count,
                max_normalized: best.normalized,
                argmax_center: best.center_id.clone(),
            }
        })
        .collect();
    Ok(HypothesisScan { records, suprema })
}

/// Outcome of splitting `[N², N² + N^α′]` into consecutive closed pieces of width `N^α`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubdivisionCheck {
    pub total: u64,
    pub pieces: u64,
    pub max_piece: u64,
}

impl SubdivisionCheck {
    /// `total ≤ (⌈N^{α′−α}⌉ + 1) · max_piece`
    pub fn holds(&self) -> bool {
        self.total <= self.pieces * self.max_piece
    }
}

pub fn subdivision_check(
    form: &QuadraticForm2,
    center: [Rational; 2],
    n: u64,
    alpha: f64,
    alpha_prime: f64,
) -> Result<SubdivisionCheck> {
    if alpha_prime < alpha {
        return Err(Error::invalid("alpha' must be at least alpha"));
    }
    let n2 = int(n as i64 * n as i64);
    let narrow = annulus_width(n, alpha);
    let wide = annulus_width(n, alpha_prime);
    let total = count_points(form, &AnnulusSpec::new(center, n2, n2 + wide, BoundaryMode::ClosedClosed)?)?;
    let pieces = ((n as f64).powf(alpha_prime - alpha)).ceil() as u64 + 1;
    let mut max_piece = 0;
    for j in 0..pieces as i64 {
        let lo = n2 + narrow * int(j);
        let piece = count_points(form, &AnnulusSpec::new(center, lo, lo + narrow, BoundaryMode::ClosedClosed)?)?;
        max_piece = max_piece.max(piece);
    }
    Ok(SubdivisionCheck { total, pieces, max_piece })
}
