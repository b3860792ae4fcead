use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::symbols::NlsSign;
use crate::error::{Error, Result};
use crate::fourier::FourierState;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalerkinOptions {
    /// Largest tolerated relative change of `‖u‖²_{L²}`.
    pub mass_tol: f64,
    pub max_halvings: u32,
    /// Switches the quintic term off (linear flow).
    pub nonlinear: bool,
}

impl Default for GalerkinOptions {
    fn default() -> Self {
        GalerkinOptions { mass_tol: 1e-8, max_halvings: 8, nonlinear: true }
    }
}

/// Galerkin solution sampled at every step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub lambda: f64,
    /// Truncation set, as integer indices `j`.
    pub modes: Vec<i64>,
    pub times: Vec<f64>,
    /// Amplitudes `c_j(t)` aligned with `modes`.
    pub coefs: Vec<Vec<Complex64>>,
    pub dt: f64,
    pub order: u32,
    pub halvings: u32,
    pub mass_drift: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn state(&self, i: usize) -> FourierState {
        FourierState::from_amplitudes(self.lambda, self.modes.iter().copied().zip(self.coefs[i].iter().copied()))
            .expect("trajectory scale was validated")
    }

    pub fn states(&self) -> Vec<FourierState> {
        (0..self.len()).map(|i| self.state(i)).collect()
    }
}

/// Projected quintic term `F(k) = λ⁻² Σ_{p₁−q₂+p₃−q₄+p₅=k} c c̄ c c̄ c` on the truncation set.
pub fn quintic_projected(modes: &[i64], c: &[Complex64], lambda: f64) -> Vec<Complex64> {
    let mut pair: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (p, cp) in modes.iter().zip(c) {
        for (q, cq) in modes.iter().zip(c) {
            *pair.entry(p - q).or_default() += cp * cq.conj();
        }
    }
    let mut quad: BTreeMap<i64, Complex64> = BTreeMap::new();
    for (a, x) in &pair {
        for (b, y) in &pair {
            *quad.entry(a + b).or_default() += x * y;
        }
    }
    let scale = 1.0 / (lambda * lambda);
    modes
        .iter()
        .map(|&k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (p, cp) in modes.iter().zip(c) {
                if let Some(q) = quad.get(&(k - p)) {
                    acc += q * cp;
                }
            }
            acc * scale
        })
        .collect()
}

fn mass(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum()
}

struct System<'a> {
    modes: &'a [i64],
    k2: Vec<f64>,
    lambda: f64,
    eps: f64,
    nonlinear: bool,
}

impl System<'_> {
    /// Interaction-picture field: `v = e^{ik²t}c`, `v' = −iε e^{ik²t} F(e^{−ik²t}v)`.
    fn field(&self, t: f64, v: &[Complex64]) -> Vec<Complex64> {
        if !self.nonlinear {
            return vec![Complex64::new(0.0, 0.0); v.len()];
        }
        let c: Vec<Complex64> = v.iter().zip(&self.k2).map(|(z, k2)| z * Complex64::cis(-k2 * t)).collect();
        let f = quintic_projected(self.modes, &c, self.lambda);
        f.iter()
            .zip(&self.k2)
            .map(|(z, k2)| Complex64::new(0.0, -self.eps) * Complex64::cis(k2 * t) * z)
            .collect()
    }

    fn rk4(&self, t: f64, v: &[Complex64], h: f64) -> Vec<Complex64> {
        let axpy = |a: &[Complex64], b: &[Complex64], s: f64| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| x + y * s).collect()
        };
        let k1 = self.field(t, v);
        let k2 = self.field(t + h / 2.0, &axpy(v, &k1, h / 2.0));
        let k3 = self.field(t + h / 2.0, &axpy(v, &k2, h / 2.0));
        let k4 = self.field(t + h, &axpy(v, &k3, h));
        (0..v.len()).map(|i| v[i] + (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (h / 6.0)).collect()
    }

    fn to_physical(&self, t: f64, v: &[Complex64]) -> Vec<Complex64> {
        v.iter().zip(&self.k2).map(|(z, k2)| z * Complex64::cis(-k2 * t)).collect()
    }
}

/// Integrates `i∂ₜu + ∂ₓ²u = ε P(|u|⁴u)` on the support of `state` up to `t_final`.
///
/// The linear part is solved exactly and RK4 handles the quintic term. The step
/// count is `⌈T/dt⌉` rounded up to an even number; the step is halved until the
/// relative mass drift is below `opts.mass_tol`.
pub fn integrate_galerkin(
    state: &FourierState,
    t_final: f64,
    dt: f64,
    sign: NlsSign,
    opts: &GalerkinOptions,
) -> Result<Trajectory> {
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::invalid("final time must be finite and nonnegative"));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("time step must be positive"));
    }
    let (modes, c0): (Vec<i64>, Vec<Complex64>) = state.amplitudes().unzip();
    let lambda = state.lambda();
    let sys = System {
        modes: &modes,
        k2: modes.iter().map(|&j| (j as f64 / lambda).powi(2)).collect(),
        lambda,
        eps: sign.eps(),
        nonlinear: opts.nonlinear,
    };
    let m0 = mass(&c0);
    let mut steps = ((t_final / dt).ceil() as usize).max(if t_final > 0.0 { 1 } else { 0 });
    steps += steps % 2;
    let mut last_drift = 0.0;
    for halvings in 0..=opts.max_halvings {
        let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
        let mut v = c0.clone();
        let mut times = vec![0.0];
        let mut coefs = vec![c0.clone()];
        let mut drift: f64 = 0.0;
        for n in 0..steps {
            let t = n as f64 * h;
            v = sys.rk4(t, &v, h);
            let t1 = if n + 1 == steps { t_final } else { (n + 1) as f64 * h };
            let c = sys.to_physical(t1, &v);
            if m0 > 0.0 {
                drift = drift.max((mass(&c) - m0).abs() / m0);
            }
            times.push(t1);
            coefs.push(c);
        }
        if drift <= opts.mass_tol {
            return Ok(Trajectory { lambda, modes, times, coefs, dt: h, order: 4, halvings, mass_drift: drift });
        }
        last_drift = drift;
        steps *= 2;
    }
    Err(Error::Integrator { drift: last_drift, halvings: opts.max_halvings, dt: t_final / (steps / 2) as f64 })
}
