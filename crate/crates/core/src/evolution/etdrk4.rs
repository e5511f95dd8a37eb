//! Fourth-order exponential time differencing (Cox-Matthews form).
//!
//! For `u' = L u + N(u)` with diagonal `L = i phase`, one step of size `h` is
//!
//! ```text
//! a  = E2 u + Q N(u)
//! b  = E2 u + Q N(a)
//! c  = E2 a + Q (2 N(b) - N(u))
//! u+ = E u + f1 N(u) + 2 f2 (N(a) + N(b)) + f3 N(c)
//! ```
//!
//! with `E = e^{Lh}`, `E2 = e^{Lh/2}`, `Q = (h/2) phi_1(Lh/2)` and
//! `f1, f2, f3` built from `phi_1..phi_3(Lh)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::free::mode_phase;
use super::nonlinear::nonlinearity;
use crate::error::{Error, Result, Violation};
use crate::fields::SpectralField;
use crate::symbols::{phi_functions, DispersionParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "two_thirds")]
    pub dealias: f64,
    #[serde(default = "eight")]
    pub picard_iters: usize,
    /// Number of snapshot intervals kept in the trajectory.
    #[serde(default = "ten")]
    pub samples: usize,
    /// Switches the quadratic term off, leaving the exact linear flow.
    #[serde(default = "yes")]
    pub nonlinear: bool,
}

fn two_thirds() -> f64 {
    2.0 / 3.0
}
fn eight() -> usize {
    8
}
fn ten() -> usize {
    10
}
fn yes() -> bool {
    true
}

impl SolveConfig {
    pub fn new(dt: f64, t_final: f64) -> Self {
        Self {
            dt,
            t_final,
            dealias: two_thirds(),
            picard_iters: 8,
            samples: 10,
            nonlinear: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            v.push(Violation::new("t_final", "must be positive"));
        }
        if !(self.dt > 0.0 && self.dt <= self.t_final) {
            v.push(Violation::new("dt", format!("need 0 < dt <= t_final, got {}", self.dt)));
        }
        if !(self.dealias > 0.0 && self.dealias <= 1.0) {
            v.push(Violation::new("dealias", format!("need 0 < dealias <= 1, got {}", self.dealias)));
        }
        if self.picard_iters < 1 {
            v.push(Violation::new("picard_iters", "must be >= 1"));
        }
        if self.samples < 1 {
            v.push(Violation::new("samples", "must be >= 1"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    /// Step count and the step actually used (`t_final / steps`).
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_final / self.dt - 1e-9).ceil().max(1.0) as usize;
        (n, self.t_final / n as f64)
    }
}

/// Progress record emitted after every step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub l2: f64,
    pub relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<SpectralField>,
    pub l2: Vec<f64>,
}

impl Trajectory {
    pub fn last(&self) -> &SpectralField {
        self.states.last().expect("a trajectory holds at least the initial state")
    }

    /// Largest `|l2(t) / l2(0) - 1|` over the samples.
    pub fn max_relative_drift(&self) -> f64 {
        let l0 = self.l2[0];
        if l0 == 0.0 {
            return 0.0;
        }
        self.l2.iter().map(|l| (l / l0 - 1.0).abs()).fold(0.0, f64::max)
    }
}

struct Coefficients {
    e: Vec<Complex64>,
    e2: Vec<Complex64>,
    q: Vec<Complex64>,
    f1: Vec<Complex64>,
    f2: Vec<Complex64>,
    f3: Vec<Complex64>,
}

fn coefficients(f: &SpectralField, h: f64, params: &DispersionParams) -> Coefficients {
    let g = *f.grid();
    let n = f.coeffs().len();
    let zero = Complex64::new(0.0, 0.0);
    let mut c = Coefficients {
        e: vec![zero; n],
        e2: vec![zero; n],
        q: vec![zero; n],
        f1: vec![zero; n],
        f2: vec![zero; n],
        f3: vec![zero; n],
    };
    for m in f.modes() {
        let l = Complex64::new(0.0, mode_phase(params, &g, m.k, m.n));
        let [e, p1, p2, p3] = phi_functions(l * h);
        let [e2, q1, _, _] = phi_functions(l * (h / 2.0));
        let i = m.index;
        c.e[i] = e;
        c.e2[i] = e2;
        c.q[i] = q1 * (h / 2.0);
        c.f1[i] = (p1 - p2 * 3.0 + p3 * 4.0) * h;
        c.f2[i] = (p2 - p3 * 2.0) * h;
        c.f3[i] = (p3 * 4.0 - p2) * h;
    }
    c
}

/// Advances `u' = i phase(D) u - u u_x` to `t_final`.
pub fn evolve_nonlinear(
    f: &SpectralField,
    cfg: &SolveConfig,
    params: &DispersionParams,
) -> Result<Trajectory> {
    evolve_nonlinear_observed(f, cfg, params, &mut |_| {})
}

/// [`evolve_nonlinear`] reporting a [`StepRecord`] after every step.
pub fn evolve_nonlinear_observed(
    f: &SpectralField,
    cfg: &SolveConfig,
    params: &DispersionParams,
    observer: &mut dyn FnMut(&StepRecord),
) -> Result<Trajectory> {
    cfg.validate()?;
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    let (steps, h) = cfg.steps();
    let c = coefficients(f, h, params);
    let every = (steps / cfg.samples).max(1);
    let rhs = |u: &SpectralField| -> SpectralField {
        if cfg.nonlinear {
            nonlinearity(u, cfg.dealias)
        } else {
            SpectralField::zeros(*u.grid())
        }
    };
    let l0 = f.l2_norm();
    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![f.clone()],
        l2: vec![l0],
    };
    let mut u = f.clone();
    let mut a = f.clone();
    let mut b = f.clone();
    let mut cc = f.clone();
    for step in 1..=steps {
        let nu = rhs(&u);
        for i in 0..u.coeffs().len() {
            a.coeffs_mut()[i] = c.e2[i] * u.coeffs()[i] + c.q[i] * nu.coeffs()[i];
        }
        let na = rhs(&a);
        for i in 0..u.coeffs().len() {
            b.coeffs_mut()[i] = c.e2[i] * u.coeffs()[i] + c.q[i] * na.coeffs()[i];
        }
        let nb = rhs(&b);
        for i in 0..u.coeffs().len() {
            cc.coeffs_mut()[i] =
                c.e2[i] * a.coeffs()[i] + c.q[i] * (nb.coeffs()[i] * 2.0 - nu.coeffs()[i]);
        }
        let nc = rhs(&cc);
        for i in 0..u.coeffs().len() {
            let v = c.e[i] * u.coeffs()[i]
                + c.f1[i] * nu.coeffs()[i]
                + c.f2[i] * (na.coeffs()[i] + nb.coeffs()[i]) * 2.0
                + c.f3[i] * nc.coeffs()[i];
            u.coeffs_mut()[i] = v;
        }
        let t = step as f64 * h;
        let l = u.l2_norm();
        let drift = if l0 > 0.0 { l / l0 - 1.0 } else { 0.0 };
        if !l.is_finite() || (l0 > 0.0 && l > 10.0 * l0) {
            return Err(Error::Blowup {
                time: t,
                ratio: if l0 > 0.0 { l / l0 } else { f64::INFINITY },
            });
        }
        observer(&StepRecord {
            step,
            time: t,
            l2: l,
            relative_drift: drift,
        });
        if step % every == 0 || step == steps {
            traj.times.push(t);
            traj.states.push(u.clone());
            traj.l2.push(l);
        }
    }
    Ok(traj)
}
