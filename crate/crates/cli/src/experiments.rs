//! Parameter sets and row builders for each experiment.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use quintic_lab::fourier::FourierState;
use quintic_lab::imethod::{
    bound_scan_symbols, ftc_residual, hamiltonian, integrate_galerkin, BoundScanParams, GalerkinOptions,
    MultiplierParams, NlsSign, SymbolContext, Thresholds,
};
use quintic_lab::lattice::{
    count_points, gauss_error, is_dyadic, scan_hypothesis_h, AnnulusSpec, BoundaryMode, CenterSampling,
    QuadraticForm2, Rational,
};
use quintic_lab::reduction::{calibrate_reduction, verify_reduction};
use quintic_lab::rng::{stream, stream_id};
use quintic_lab::strichartz::{block_average_sup, h_spectrum, strichartz_scan, Ensemble};
use quintic_lab::trilinear::{standard_geometries, trilinear_scale_scan, DEFAULT_PAIR_CAP};

use crate::error::CliError;

pub type Row = Map<String, Value>;

/// Output of one experiment before it is wrapped into a report.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; `values` must follow the declared column order.
    fn push(&mut self, values: Vec<Value>) {
        assert_eq!(values.len(), self.columns.len(), "row arity");
        self.rows.push(self.columns.iter().cloned().zip(values).collect());
    }
}

fn require(cond: bool, path: &str, msg: impl Into<String>) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::usage(path, msg))
    }
}

fn dyadic_list(list: &[u64], path: &str) -> Result<(), CliError> {
    require(!list.is_empty(), path, "list is empty")?;
    match list.iter().find(|&&n| !is_dyadic(n)) {
        Some(n) => Err(CliError::usage(path, format!("{n} is not a power of two"))),
        None => Ok(()),
    }
}

fn parse_rational(s: &str, path: &str) -> Result<Rational, CliError> {
    s.trim().parse::<Rational>().map_err(|_| CliError::usage(path, format!("`{s}` is not a rational number")))
}

// ---------------------------------------------------------------- annulus-count

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnulusCountParams {
    /// Coefficients `a, b, c` of `ax² + bxy + cy²`, as rationals.
    pub form: [String; 3],
    pub center: [String; 2],
    pub r1sq: String,
    pub r2sq: String,
    pub boundary: BoundaryMode,
}

impl Default for AnnulusCountParams {
    fn default() -> Self {
        AnnulusCountParams {
            form: ["1".into(), "1".into(), "1".into()],
            center: ["0".into(), "0".into()],
            r1sq: "0".into(),
            r2sq: "2".into(),
            boundary: BoundaryMode::ClosedOpen,
        }
    }
}

pub fn annulus_count(p: &AnnulusCountParams) -> Result<Table, CliError> {
    let f: Vec<Rational> =
        p.form.iter().enumerate().map(|(i, s)| parse_rational(s, &format!("form[{i}]"))).collect::<Result<_, _>>()?;
    let c: Vec<Rational> = p
        .center
        .iter()
        .enumerate()
        .map(|(i, s)| parse_rational(s, &format!("center[{i}]")))
        .collect::<Result<_, _>>()?;
    let form = QuadraticForm2::new(f[0], f[1], f[2]).map_err(|e| CliError::usage("form", e.to_string()))?;
    let region = AnnulusSpec::new([c[0], c[1]], parse_rational(&p.r1sq, "r1sq")?, parse_rational(&p.r2sq, "r2sq")?, p.boundary)
        .map_err(|e| CliError::usage("r2sq", e.to_string()))?;
    let count = count_points(&form, &region)?;
    let err = gauss_error(&form, &region)?;
    let mut t = Table::new(&["form", "center_x", "center_y", "r1sq", "r2sq", "boundary", "count", "gauss_error"]);
    t.push(vec![
        json!(format!("{}x^2+{}xy+{}y^2", f[0], f[1], f[2])),
        json!(c[0].to_string()),
        json!(c[1].to_string()),
        json!(region.r1sq.to_string()),
        json!(region.r2sq.to_string()),
        serde_json::to_value(p.boundary).expect("enum serializes"),
        json!(count),
        json!(err),
    ]);
    Ok(t)
}

// ---------------------------------------------------------------- hypothesis-scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HypothesisScanParams {
    pub alpha: f64,
    pub n_list: Vec<u64>,
    pub random_centers: usize,
    pub origin: bool,
    pub deep_holes: bool,
    pub lattice_points: bool,
    /// Emit every `(N, center)` cell instead of the per-`N` suprema.
    pub all_centers: bool,
}

impl Default for HypothesisScanParams {
    fn default() -> Self {
        HypothesisScanParams {
            alpha: 0.68,
            n_list: (4..=12).map(|e| 1 << e).collect(),
            random_centers: 64,
            origin: true,
            deep_holes: true,
            lattice_points: false,
            all_centers: false,
        }
    }
}

pub fn hypothesis_scan(p: &HypothesisScanParams, seed: u64) -> Result<Table, CliError> {
    dyadic_list(&p.n_list, "n_list")?;
    require(p.alpha > 0.0 && p.alpha < 2.0, "alpha", "must lie in (0, 2)")?;
    let centers = CenterSampling {
        origin: p.origin,
        lattice_points: p.lattice_points,
        deep_holes: p.deep_holes,
        random: p.random_centers,
    };
    require(!centers.centers(seed).is_empty(), "random_centers", "no centers selected")?;
    let scan = scan_hypothesis_h(p.alpha, &p.n_list, &centers, seed)?;
    if p.all_centers {
        let mut t = Table::new(&["n", "center_id", "center_x", "center_y", "r1sq", "r2sq", "count", "normalized"]);
        for r in scan.records {
            t.push(vec![
                json!(r.n),
                json!(r.center_id),
                json!(r.center[0]),
                json!(r.center[1]),
                json!(r.r1sq),
                json!(r.r2sq),
                json!(r.count),
                json!(r.normalized),
            ]);
        }
        return Ok(t);
    }
    let mut t = Table::new(&["n", "max_count", "max_normalized", "argmax_center"]);
    for s in scan.suprema {
        t.push(vec![json!(s.n), json!(s.max_count), json!(s.max_normalized), json!(s.argmax_center)]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- reduction-verify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReductionVerifyParams {
    pub n_min: i64,
    pub n_max: i64,
    pub k_set: Vec<u64>,
    pub radius_cap: u64,
    pub calib_n_min: i64,
    pub calib_n_max: i64,
    pub calib_k_set: Vec<u64>,
    pub calib_radius_cap: u64,
}

impl Default for ReductionVerifyParams {
    fn default() -> Self {
        ReductionVerifyParams {
            n_min: -30,
            n_max: 30,
            k_set: vec![1, 2, 4, 8],
            radius_cap: 900,
            calib_n_min: -6,
            calib_n_max: 6,
            calib_k_set: vec![1, 2, 4],
            calib_radius_cap: 200,
        }
    }
}

pub fn reduction_verify(p: &ReductionVerifyParams) -> Result<Table, CliError> {
    require(p.n_min <= p.n_max, "n_max", "must be at least n_min")?;
    require(p.calib_n_min <= p.calib_n_max, "calib_n_max", "must be at least calib_n_min")?;
    require(!p.k_set.is_empty(), "k_set", "list is empty")?;
    require(!p.calib_k_set.is_empty(), "calib_k_set", "list is empty")?;
    let outcome = calibrate_reduction(p.calib_n_min..=p.calib_n_max, &p.calib_k_set, p.calib_radius_cap)?;
    let calib = &outcome.calibration;
    let report = verify_reduction(calib, p.n_min..=p.n_max, &p.k_set, p.radius_cap)?;
    let offset = |i: usize| match calib.offsets[i] {
        Some([x, y]) => json!(format!("({x},{y})")),
        None => Value::Null,
    };
    let mut t = Table::new(&[
        "k", "cells", "passed", "failed", "radius_scale", "offset_0", "offset_1", "offset_2", "unique",
    ]);
    for &k in &p.k_set {
        let cells: Vec<_> = report.cells.iter().filter(|c| c.k == k).collect();
        let passed = cells.iter().filter(|c| c.pass).count();
        t.push(vec![
            json!(k),
            json!(cells.len()),
            json!(passed),
            json!(cells.len() - passed),
            json!(calib.radius_scale.to_string()),
            offset(0),
            offset(1),
            offset(2),
            json!(outcome.is_unique()),
        ]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- h-spectrum

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    Constant,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HSpectrumParams {
    pub n: u64,
    pub profile: Profile,
    /// Exponent used for the reported block-average supremum.
    pub alpha: f64,
    pub n_cap: u64,
}

impl Default for HSpectrumParams {
    fn default() -> Self {
        HSpectrumParams { n: 4, profile: Profile::Constant, alpha: 0.7, n_cap: 16 }
    }
}

pub fn h_spectrum_table(p: &HSpectrumParams, seed: u64) -> Result<Table, CliError> {
    require(is_dyadic(p.n), "n", "must be a power of two")?;
    let range = -(p.n as i64)..=p.n as i64;
    let mags: BTreeMap<i64, f64> = match p.profile {
        Profile::Constant => range.map(|k| (k, 1.0)).collect(),
        Profile::Uniform => {
            use rand::Rng;
            let mut rng = stream(seed, stream_id(p.n, 0));
            range.map(|k| (k, rng.gen::<f64>())).collect()
        }
    };
    let h = h_spectrum(&mags, p.n, p.n_cap)?;
    let (sup, k) = block_average_sup(&h, p.alpha);
    let mut t = Table::new(&["tau", "h", "block_sup", "block_k"]);
    for (&tau, &v) in &h.values {
        t.push(vec![json!(tau), json!(v), json!(sup), json!(k)]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- strichartz-scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StrichartzScanParams {
    pub alpha: f64,
    pub n_list: Vec<u64>,
    pub random_members: usize,
    pub constant_profile: bool,
}

impl Default for StrichartzScanParams {
    fn default() -> Self {
        StrichartzScanParams { alpha: 0.7, n_list: vec![16, 32, 64], random_members: 8, constant_profile: true }
    }
}

pub fn strichartz_table(p: &StrichartzScanParams, seed: u64) -> Result<Table, CliError> {
    dyadic_list(&p.n_list, "n_list")?;
    require(p.alpha > 0.0, "alpha", "must be positive")?;
    require(p.random_members > 0 || p.constant_profile, "random_members", "ensemble is empty")?;
    let ensemble = Ensemble { random_members: p.random_members, constant_profile: p.constant_profile };
    let scan = strichartz_scan(p.alpha, &p.n_list, &ensemble, seed)?;
    let mut t = Table::new(&["n", "max_ratio", "argmax_member", "members", "slope"]);
    for &(n, max) in &scan.maxima {
        let members: Vec<_> = scan.records.iter().filter(|r| r.n == n).collect();
        let arg = members.iter().find(|r| r.ratio == max).map(|r| r.member.clone()).unwrap_or_default();
        t.push(vec![json!(n), json!(max), json!(arg), json!(members.len()), json!(scan.slope)]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- trilinear-scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrilinearScanParams {
    pub lambdas: Vec<i64>,
    pub gg: i64,
    pub geometries: Vec<String>,
    pub pair_cap: u64,
}

impl Default for TrilinearScanParams {
    fn default() -> Self {
        TrilinearScanParams {
            lambdas: vec![8, 16, 32, 64],
            gg: 8,
            geometries: standard_geometries().into_iter().map(|g| g.name).collect(),
            pair_cap: DEFAULT_PAIR_CAP,
        }
    }
}

pub fn trilinear_table(p: &TrilinearScanParams) -> Result<Table, CliError> {
    require(!p.lambdas.is_empty(), "lambdas", "list is empty")?;
    require(p.lambdas.iter().all(|&l| l >= 1), "lambdas", "scales must be positive")?;
    require(p.gg >= 1, "gg", "must be positive")?;
    let all = standard_geometries();
    let mut chosen = Vec::new();
    for (i, name) in p.geometries.iter().enumerate() {
        match all.iter().find(|g| &g.name == name) {
            Some(g) => chosen.push(g.clone()),
            None => return Err(CliError::usage(format!("geometries[{i}]"), format!("unknown geometry `{name}`"))),
        }
    }
    require(!chosen.is_empty(), "geometries", "list is empty")?;
    let (records, slopes) = trilinear_scale_scan(&chosen, &p.lambdas, p.gg, p.pair_cap)?;
    let mut t = Table::new(&["geometry", "lambda", "sup", "k", "enhanced", "normalized", "slope"]);
    for r in records {
        let slope = slopes.iter().find(|(g, _)| *g == r.geometry).map(|s| s.1).unwrap_or(f64::NAN);
        t.push(vec![
            json!(r.geometry),
            json!(r.lambda),
            json!(r.sup),
            json!(r.k),
            json!(r.enhanced),
            json!(r.normalized),
            json!(slope),
        ]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- symbol-bound-scan

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymbolBoundParams {
    pub s: f64,
    pub samples: usize,
    pub n_list: Vec<u64>,
    pub c_sim: f64,
    pub c_gg: f64,
    pub states: usize,
    pub sign: NlsSign,
}

impl Default for SymbolBoundParams {
    fn default() -> Self {
        SymbolBoundParams {
            s: 0.5,
            samples: 100_000,
            n_list: vec![64, 256, 1024],
            c_sim: 2.0,
            c_gg: 8.0,
            states: 32,
            sign: NlsSign::Defocusing,
        }
    }
}

pub fn symbol_bound_table(p: &SymbolBoundParams, seed: u64) -> Result<Table, CliError> {
    dyadic_list(&p.n_list, "n_list")?;
    require(p.s > 0.0 && p.s < 1.0, "s", "must lie in (0, 1)")?;
    require(p.samples > 0, "samples", "must be positive")?;
    require(p.c_sim >= 1.0, "c_sim", "must be at least 1")?;
    require(p.c_gg >= 1.0, "c_gg", "must be at least 1")?;
    let mut params = BoundScanParams::new(p.s, p.samples, p.n_list.clone(), seed);
    params.thresholds = Thresholds { c_sim: p.c_sim, c_gg: p.c_gg };
    params.states = p.states;
    params.sign = p.sign;
    let scan = bound_scan_symbols(&params)?;
    let mut t = Table::new(&[
        "n",
        "accepted",
        "rejected",
        "gaps",
        "nonresonant",
        "resonant",
        "sigma_tilde_max",
        "sigma_tilde_q999",
        "sigma_tilde_argmax",
        "case1_count",
        "case1_max",
        "case2_count",
        "case2_max",
        "case3_count",
        "case3_max",
        "case4_count",
        "case4_max",
        "lambda6_ratio",
        "decay_exponent",
    ]);
    for r in &scan.records {
        let mut v = vec![
            json!(r.n),
            json!(r.accepted),
            json!(r.rejected),
            json!(r.gaps),
            json!(r.nonresonant),
            json!(r.resonant),
            json!(r.sigma_tilde.max),
            json!(r.sigma_tilde_q999),
            json!(r.sigma_tilde.argmax.as_ref().map(|js| format!("{js:?}"))),
        ];
        for c in &r.m6bar {
            v.push(json!(c.count));
            v.push(json!(c.max));
        }
        v.push(json!(r.lambda6_ratio));
        v.push(json!(scan.decay_exponent));
        t.push(v);
    }
    Ok(t)
}

// ---------------------------------------------------------------- energy-track

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergyTrackParams {
    pub lambda: i64,
    pub n: u64,
    pub s: f64,
    pub t_final: f64,
    /// Step sizes of the refinement sequence.
    pub dt_list: Vec<f64>,
    pub modes: Vec<i64>,
    pub amp_re: Vec<f64>,
    pub amp_im: Vec<f64>,
    pub sign: NlsSign,
    pub mass_tol: f64,
    pub table_cap: u64,
}

impl Default for EnergyTrackParams {
    fn default() -> Self {
        EnergyTrackParams {
            lambda: 4,
            n: 4,
            s: 0.5,
            t_final: 0.1,
            dt_list: vec![0.01, 0.005, 0.0025, 0.00125],
            modes: vec![-5, 2, 17, -19],
            amp_re: vec![0.3, 0.4, 0.2, -0.1],
            amp_im: vec![0.1, -0.2, 0.2, 0.25],
            sign: NlsSign::Defocusing,
            mass_tol: 1e-8,
            table_cap: 1 << 20,
        }
    }
}

pub fn energy_track(p: &EnergyTrackParams) -> Result<Table, CliError> {
    require(p.lambda >= 1, "lambda", "must be a positive integer")?;
    require(!p.modes.is_empty(), "modes", "list is empty")?;
    require(p.amp_re.len() == p.modes.len(), "amp_re", "length must match modes")?;
    require(p.amp_im.len() == p.modes.len(), "amp_im", "length must match modes")?;
    require(!p.dt_list.is_empty(), "dt_list", "list is empty")?;
    require(p.dt_list.iter().all(|&d| d > 0.0), "dt_list", "steps must be positive")?;
    require(p.t_final >= 0.0, "t_final", "must be nonnegative")?;
    let mut sorted = p.modes.clone();
    sorted.sort_unstable();
    sorted.dedup();
    require(sorted.len() == p.modes.len(), "modes", "duplicate mode")?;
    let multiplier = MultiplierParams::new(p.n, p.s).map_err(|e| CliError::usage("n", e.to_string()))?;
    let ctx = SymbolContext::new(multiplier, p.sign);
    let u0 = FourierState::from_amplitudes(
        p.lambda as f64,
        p.modes.iter().zip(p.amp_re.iter().zip(&p.amp_im)).map(|(&j, (&a, &b))| (j, Complex64::new(a, b))),
    )?;
    let h0 = hamiltonian(&u0, p.sign.eps());
    let opts = GalerkinOptions { mass_tol: p.mass_tol, ..Default::default() };
    let mut t = Table::new(&[
        "dt",
        "steps",
        "mass_drift",
        "energy_drift",
        "delta_e1",
        "delta_tilde",
        "integral",
        "residual",
        "observed_order",
    ]);
    let mut prev: Option<(f64, f64)> = None;
    for &dt in &p.dt_list {
        let tr = integrate_galerkin(&u0, p.t_final, dt, p.sign, &opts)?;
        let ftc = ftc_residual(&tr, &ctx, p.table_cap)?;
        let h1 = hamiltonian(&tr.state(tr.len() - 1), p.sign.eps());
        let drift = if h0 != 0.0 { (h1 - h0).abs() / h0.abs() } else { (h1 - h0).abs() };
        let order = match prev {
            Some((pdt, pres)) if ftc.residual > 0.0 && pres > 0.0 && pdt != tr.dt => {
                json!((pres / ftc.residual).ln() / (pdt / tr.dt).ln())
            }
            _ => Value::Null,
        };
        prev = Some((tr.dt, ftc.residual));
        t.push(vec![
            json!(tr.dt),
            json!(tr.len() - 1),
            json!(tr.mass_drift),
            json!(drift),
            json!(ftc.terms.delta_energy),
            json!(ftc.terms.delta_tilde),
            json!(ftc.terms.integral),
            json!(ftc.residual),
            order,
        ]);
    }
    Ok(t)
}
