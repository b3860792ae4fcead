//! Counting `ℤ³ ∩ P_n ∩ C_ℓ` and matching it against elliptic-annulus counts.
//!
//! `P_n` is the plane `n₁ + n₂ + n₃ = n` and `C_ℓ` the cylindrical shell of
//! squared radius `[ℓK, (ℓ+1)K)` around the line `t(1,1,1)`. Inside `P_n` the
//! integer points form a translate of the A₂ root lattice, whose Gram form in
//! the basis `(1,−1,0), (1,0,−1)` is `2(x² + xy + y²)`. The radius scale and
//! the per-residue offsets are not assumed: [`calibrate_reduction`] finds them
//! by exact matching on a grid.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{fmt_rat, int, rat, BoundaryMode, QuadraticForm2, Rational};

/// Default ceiling on `(ℓ+1)·K`.
pub const DEFAULT_RADIUS_CAP: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneSliceSpec {
    pub n: i64,
    pub ell: u64,
    pub k: u64,
    pub mode: BoundaryMode,
    pub radius_cap: u64,
}

impl PlaneSliceSpec {
    pub fn new(n: i64, ell: u64, k: u64) -> Self {
        PlaneSliceSpec { n, ell, k, mode: BoundaryMode::ClosedOpen, radius_cap: DEFAULT_RADIUS_CAP }
    }

    fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("annulus width K must be positive"));
        }
        let outer = (self.ell + 1).saturating_mul(self.k);
        if outer > self.radius_cap {
            return Err(Error::cap("(ell+1)*K", outer, self.radius_cap));
        }
        Ok(())
    }
}

/// `9·|x − (n/3)(1,1,1)|²` for `x = (n₁, n₂, n − n₁ − n₂)`.
#[inline]
fn scaled_dist2(n: i64, n1: i64, n2: i64) -> i64 {
    let n3 = n - n1 - n2;
    let (a, b, c) = (3 * n1 - n, 3 * n2 - n, 3 * n3 - n);
    a * a + b * b + c * c
}

fn box_radius(outer_sq: u64) -> i64 {
    (outer_sq as f64).sqrt().ceil() as i64 + 1
}

/// Number of `(n₁,n₂,n₃) ∈ ℤ³` with `Σnᵢ = n` and `ℓK ≤ |x − n/3·(1,1,1)|² < (ℓ+1)K`.
pub fn count_plane_slice(spec: &PlaneSliceSpec) -> Result<u64> {
    spec.validate()?;
    let lo = 9 * (spec.ell * spec.k) as i64;
    let hi = 9 * ((spec.ell + 1) * spec.k) as i64;
    let r = box_radius((spec.ell + 1) * spec.k);
    let center = Integer::div_floor(&spec.n, &3);
    let mut count = 0;
    for n1 in center - r..=center + r + 1 {
        for n2 in center - r..=center + r + 1 {
            let s = scaled_dist2(spec.n, n1, n2);
            let upper = match spec.mode {
                BoundaryMode::ClosedOpen => s < hi,
                BoundaryMode::ClosedClosed => s <= hi,
            };
            if s >= lo && upper {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Counts of [`count_plane_slice`] for every `ℓ` with `(ℓ+1)K ≤ cap`, in one pass.
pub fn plane_slice_histogram(n: i64, k: u64, radius_cap: u64) -> Result<Vec<u64>> {
    if k == 0 {
        return Err(Error::invalid("annulus width K must be positive"));
    }
    let shells = (radius_cap / k) as usize;
    let mut hist = vec![0u64; shells];
    let r = box_radius(radius_cap);
    let center = Integer::div_floor(&n, &3);
    for n1 in center - r..=center + r + 1 {
        for n2 in center - r..=center + r + 1 {
            let ell = (scaled_dist2(n, n1, n2) / (9 * k as i64)) as usize;
            if ell < shells {
                hist[ell] += 1;
            }
        }
    }
    Ok(hist)
}

/// Counts of `Q(p − c) ∈ [ς ℓK, ς(ℓ+1)K)` over `p ∈ ℤ²` for each shell `ℓ < shells`.
pub fn annulus_histogram(
    form: &QuadraticForm2,
    center: [Rational; 2],
    scale: Rational,
    k: u64,
    shells: usize,
) -> Vec<u64> {
    let mut hist = vec![0u64; shells];
    let outer = scale * int((shells as u64 * k) as i64);
    let delta = form.discriminant4().to_f64().unwrap();
    let of = outer.to_f64().unwrap();
    let rx = (4.0 * form.c().to_f64().unwrap() * of / delta).sqrt().ceil() as i64 + 2;
    let ry = (4.0 * form.a().to_f64().unwrap() * of / delta).sqrt().ceil() as i64 + 2;
    let width = scale * int(k as i64);
    let cx = center[0].floor().to_integer();
    let cy = center[1].floor().to_integer();
    for x in cx - rx..=cx + rx {
        for y in cy - ry..=cy + ry {
            let q = form.eval(int(x) - center[0], int(y) - center[1]);
            if q >= outer {
                continue;
            }
            let ell = (q / width).floor().to_integer() as usize;
            hist[ell] += 1;
        }
    }
    hist
}

/// Radius scale and per-residue offsets relating plane slices to annuli of `x² + xy + y²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionCalibration {
    pub radius_scale: Rational,
    /// Offset `c_r` for `n ≡ r (mod 3)`; `None` when no such `n` was on the grid.
    pub offsets: [Option<[Rational; 2]>; 3],
    pub verified: bool,
}

impl ReductionCalibration {
    pub fn offset_for(&self, n: i64) -> Option<[Rational; 2]> {
        self.offsets[n.rem_euclid(3) as usize]
    }
}

/// Result of the calibration search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CalibrationOutcome {
    pub calibration: ReductionCalibration,
    /// Every `(ς, offset classes)` combination that matched the whole grid.
    pub matching: Vec<ReductionCalibration>,
}

impl CalibrationOutcome {
    pub fn is_unique(&self) -> bool {
        self.matching.len() == 1
    }
}

pub const SCALE_CANDIDATES: [(i64, i64); 3] = [(1, 1), (1, 2), (2, 1)];

fn reduce_mod1(r: Rational) -> Rational {
    r - r.floor()
}

/// Coset representatives tried as offsets: thirds and halves of the unit square.
pub fn candidate_offsets() -> Vec<[Rational; 2]> {
    let mut out = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            out.push([rat(i, 3), rat(j, 3)]);
        }
    }
    out.push([rat(1, 2), int(0)]);
    out.push([int(0), rat(1, 2)]);
    out.push([rat(1, 2), rat(1, 2)]);
    out
}

/// Smallest representative of the orbit of `c` under the form's automorphisms modulo `ℤ²`.
///
/// Offsets in one orbit give identical counts, so uniqueness is only meaningful per orbit.
pub fn canonical_offset(form: &QuadraticForm2, c: [Rational; 2]) -> [Rational; 2] {
    let mut best: Option<[Rational; 2]> = None;
    for g in form.automorphisms() {
        // Q(g p) = Q(p), so Q(p − c) = Q(g⁻¹p − g⁻¹c); g⁻¹ ranges over the group too.
        let img = [
            reduce_mod1(int(g[0][0]) * c[0] + int(g[0][1]) * c[1]),
            reduce_mod1(int(g[1][0]) * c[0] + int(g[1][1]) * c[1]),
        ];
        if best.is_none_or(|b| img < b) {
            best = Some(img);
        }
    }
    best.unwrap_or(c)
}

/// One `(n, K)` row of the grid with the 3-d histogram.
struct GridRow {
    n: i64,
    k: u64,
    hist: Vec<u64>,
}

fn grid_rows(n_range: &RangeInclusive<i64>, k_set: &[u64], radius_cap: u64) -> Result<Vec<GridRow>> {
    let cells: Vec<(i64, u64)> = n_range
        .clone()
        .flat_map(|n| k_set.iter().map(move |&k| (n, k)))
        .collect();
    cells
        .par_iter()
        .map(|&(n, k)| Ok(GridRow { n, k, hist: plane_slice_histogram(n, k, radius_cap)? }))
        .collect()
}

fn validate_grid(n_range: &RangeInclusive<i64>, k_set: &[u64], radius_cap: u64) -> Result<()> {
    if n_range.is_empty() || k_set.is_empty() {
        return Err(Error::invalid("calibration grid is empty"));
    }
    if let Some(&k) = k_set.iter().find(|&&k| k == 0 || k > radius_cap) {
        return Err(Error::invalid(format!("K = {k} must lie in [1, radius cap]")));
    }
    Ok(())
}

/// Searches radius scales and offset cosets for an exact match on every grid cell.
pub fn calibrate_reduction(
    n_range: RangeInclusive<i64>,
    k_set: &[u64],
    radius_cap: u64,
) -> Result<CalibrationOutcome> {
    validate_grid(&n_range, k_set, radius_cap)?;
    let form = QuadraticForm2::hexagonal();
    let rows = grid_rows(&n_range, k_set, radius_cap)?;
    let classes: Vec<[Rational; 2]> = candidate_offsets()
        .into_iter()
        .map(|c| canonical_offset(&form, c))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut matching = Vec::new();
    // (mismatched cells, worst cell) of the closest candidate, for the failure report.
    let mut closest: Option<(usize, String, u64, u64)> = None;
    for &(sn, sd) in &SCALE_CANDIDATES {
        let scale = rat(sn, sd);
        let mut per_residue: [Vec<[Rational; 2]>; 3] = Default::default();
        let mut present = [false; 3];
        for residue in 0..3usize {
            let res_rows: Vec<&GridRow> =
                rows.iter().filter(|r| r.n.rem_euclid(3) as usize == residue).collect();
            if res_rows.is_empty() {
                continue;
            }
            present[residue] = true;
            for &c in &classes {
                let mut mismatches = 0usize;
                let mut worst: Option<(String, u64, u64)> = None;
                for row in &res_rows {
                    let hist2 = annulus_histogram(&form, c, scale, row.k, row.hist.len());
                    for (ell, (&l, &r)) in row.hist.iter().zip(&hist2).enumerate() {
                        if l != r {
                            mismatches += 1;
                            let gap = l.abs_diff(r);
                            if worst.as_ref().is_none_or(|w| w.1.abs_diff(w.2) < gap) {
                                worst = Some((
                                    format!(
                                        "n={} ell={} K={} scale={} offset=({}, {})",
                                        row.n,
                                        ell,
                                        row.k,
                                        fmt_rat(&scale),
                                        fmt_rat(&c[0]),
                                        fmt_rat(&c[1])
                                    ),
                                    l,
                                    r,
                                ));
                            }
                        }
                    }
                }
                if mismatches == 0 {
                    per_residue[residue].push(c);
                } else if let Some((cell, l, r)) = worst {
                    if closest.as_ref().is_none_or(|b| mismatches < b.0) {
                        closest = Some((mismatches, cell, l, r));
                    }
                }
            }
        }
        let complete = (0..3).all(|r| !present[r] || !per_residue[r].is_empty());
        if !complete {
            continue;
        }
        let options = |r: usize| -> Vec<Option<[Rational; 2]>> {
            if present[r] {
                per_residue[r].iter().map(|&c| Some(c)).collect()
            } else {
                vec![None]
            }
        };
        for c0 in options(0) {
            for c1 in options(1) {
                for c2 in options(2) {
                    matching.push(ReductionCalibration {
                        radius_scale: scale,
                        offsets: [c0, c1, c2],
                        verified: true,
                    });
                }
            }
        }
    }
    match matching.first() {
        Some(first) => Ok(CalibrationOutcome { calibration: first.clone(), matching }),
        None => {
            let (_, cell, lhs, rhs) = closest.unwrap_or_default();
            Err(Error::NoCalibration { cell, lhs, rhs })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellResult {
    pub n: i64,
    pub ell: u64,
    pub k: u64,
    pub plane_count: u64,
    pub annulus_count: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub cells: Vec<CellResult>,
    pub passed: usize,
    pub failed: usize,
}

impl ReductionReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0 && self.passed > 0
    }
}

/// Exact cell-by-cell comparison of plane-slice and annulus counts under `calib`.
pub fn verify_reduction(
    calib: &ReductionCalibration,
    n_range: RangeInclusive<i64>,
    k_set: &[u64],
    radius_cap: u64,
) -> Result<ReductionReport> {
    validate_grid(&n_range, k_set, radius_cap)?;
    let form = QuadraticForm2::hexagonal();
    let rows = grid_rows(&n_range, k_set, radius_cap)?;
    let cells: Vec<CellResult> = rows
        .par_iter()
        .flat_map_iter(|row| {
            let hist2 = calib
                .offset_for(row.n)
                .map(|c| annulus_histogram(&form, c, calib.radius_scale, row.k, row.hist.len()));
            row.hist
                .iter()
                .enumerate()
                .map(|(ell, &l)| {
                    let r = hist2.as_ref().map_or(0, |h| h[ell]);
                    CellResult {
                        n: row.n,
                        ell: ell as u64,
                        k: row.k,
                        plane_count: l,
                        annulus_count: r,
                        pass: hist2.is_some() && l == r,
                    }
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let passed = cells.iter().filter(|c| c.pass).count();
    Ok(ReductionReport { failed: cells.len() - passed, passed, cells })
}

/// Number of sum-`n` triples strictly inside squared radius `cap`.
pub fn plane_disk_count(n: i64, radius_cap: u64) -> u64 {
    let r = box_radius(radius_cap);
    let center = Integer::div_floor(&n, &3);
    let hi = 9 * radius_cap as i64;
    let mut count = 0;
    for n1 in center - r..=center + r + 1 {
        for n2 in center - r..=center + r + 1 {
            if scaled_dist2(n, n1, n2) < hi {
                count += 1;
            }
        }
    }
    count
}
