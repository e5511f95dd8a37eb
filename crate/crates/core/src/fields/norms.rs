//! Fourier restriction norms on sparse space-time fields.
//!
//! With `sigma = tau - phase(k, eta)` and `<x> = (1 + x^2)^{1/2}`:
//!
//! * `X`:  `|| <k>^{s1} <eta>^{s2} <sigma>^b F ||_{l^2}`
//! * `Xweighted`: the same times `(1 + <sigma> / <k>^{alpha+1})^beta`
//! * `Y`:  `l^2` over `(k, eta)` of `l^1` over tau of the `X`-weight with `b = -1` and the extra factor
//! * `Z`:  `Y + Xweighted` at `b = -1/2`
//!
//! Sums carry the lattice measures `d_tau` and `d_eta^d`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::spacetime::{SpaceTimeField, TauSegment};
use super::spectral::sobolev_weight;
use super::transform::plan;
use crate::error::{Error, Result, Violation};
use crate::symbols::DispersionParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Sobolev,
    X,
    #[serde(alias = "x-weighted")]
    Xweighted,
    Y,
    Z,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub flavor: Flavor,
    #[serde(default)]
    pub s1: f64,
    #[serde(default)]
    pub s2: f64,
    #[serde(default)]
    pub b: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "two")]
    pub mixed_r: f64,
    #[serde(default = "two")]
    pub mixed_p: f64,
    #[serde(default = "two")]
    pub mixed_q: f64,
}

fn two() -> f64 {
    2.0
}

impl NormSpec {
    fn base(flavor: Flavor, s1: f64, s2: f64, b: f64, beta: f64) -> Self {
        Self {
            flavor,
            s1,
            s2,
            b,
            beta,
            mixed_r: 2.0,
            mixed_p: 2.0,
            mixed_q: 2.0,
        }
    }
    pub fn sobolev(s1: f64, s2: f64) -> Self {
        Self::base(Flavor::Sobolev, s1, s2, 0.0, 0.0)
    }
    pub fn x(s1: f64, s2: f64, b: f64) -> Self {
        Self::base(Flavor::X, s1, s2, b, 0.0)
    }
    pub fn x_weighted(s1: f64, s2: f64, b: f64, beta: f64) -> Self {
        Self::base(Flavor::Xweighted, s1, s2, b, beta)
    }
    pub fn y(s1: f64, s2: f64, beta: f64) -> Self {
        Self::base(Flavor::Y, s1, s2, -1.0, beta)
    }
    pub fn z(s1: f64, s2: f64, beta: f64) -> Self {
        Self::base(Flavor::Z, s1, s2, -0.5, beta)
    }
    pub fn mixed(r: f64, p: f64, q: f64) -> Self {
        Self {
            mixed_r: r,
            mixed_p: p,
            mixed_q: q,
            ..Self::base(Flavor::Mixed, 0.0, 0.0, 0.0, 0.0)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        for (name, x) in [("s1", self.s1), ("s2", self.s2), ("b", self.b), ("beta", self.beta)] {
            if !x.is_finite() {
                v.push(Violation::new(name, "must be finite"));
            }
        }
        if self.beta < 0.0 {
            v.push(Violation::new("beta", format!("must be >= 0, got {}", self.beta)));
        }
        match self.flavor {
            Flavor::Z if self.b != -0.5 => {
                v.push(Violation::new("b", format!("the Z norm fixes b = -1/2, got {}", self.b)))
            }
            Flavor::Y if self.b != -1.0 => {
                v.push(Violation::new("b", format!("the Y norm fixes b = -1, got {}", self.b)))
            }
            Flavor::X if self.beta != 0.0 => {
                v.push(Violation::new("beta", "the plain X norm carries no weight exponent"))
            }
            Flavor::Mixed => {
                if let Err(Error::ExponentRange(m)) =
                    check_mixed_exponents(self.mixed_r, self.mixed_p, self.mixed_q)
                {
                    v.push(Violation::new("mixed", m));
                }
            }
            _ => {}
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }
}

fn check_mixed_exponents(r: f64, p: f64, q: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&r) {
        return Err(Error::ExponentRange(format!("r must lie in [1, 2], got {r}")));
    }
    for (name, x) in [("p", p), ("q", q)] {
        if !(x >= 1.0) {
            return Err(Error::ExponentRange(format!("{name} must lie in [1, inf], got {x}")));
        }
    }
    Ok(())
}

/// `(1 + <sigma> / <k>^{alpha+1})^beta`.
#[inline]
pub fn modulation_weight(params: &DispersionParams, k: f64, sigma_bracket: f64, beta: f64) -> f64 {
    if beta == 0.0 {
        return 1.0;
    }
    let kb = (1.0 + k * k).powf(0.5 * (params.alpha() + 1.0));
    (1.0 + sigma_bracket / kb).powf(beta)
}

/// Streams modes into one of the space-time norms.
#[derive(Debug, Clone)]
pub struct ModeNormAccumulator {
    spec: NormSpec,
    params: DispersionParams,
    d_tau: f64,
    eta_measure: f64,
    acc_x: f64,
    acc_y: f64,
}

/// Running sums for one spatial mode; close with [`ModeNormAccumulator::end_mode`].
#[derive(Debug, Clone, Copy)]
pub struct ModeScope {
    k_bracket: f64,
    space: f64,
    phase: f64,
    x: f64,
    y_l1: f64,
}

impl ModeNormAccumulator {
    pub fn new(spec: NormSpec, params: DispersionParams, grid: &GridSpec) -> Result<Self> {
        spec.validate()?;
        if matches!(spec.flavor, Flavor::Sobolev | Flavor::Mixed) {
            return Err(Error::NormMismatch(format!(
                "{:?} is not a modulation-weighted space-time norm",
                spec.flavor
            )));
        }
        Ok(Self {
            spec,
            params,
            d_tau: grid.d_tau(),
            eta_measure: grid.eta_measure(),
            acc_x: 0.0,
            acc_y: 0.0,
        })
    }

    /// True when the norm is the plain space-time `L^2` norm.
    pub fn is_plain_l2(&self) -> bool {
        let s = &self.spec;
        matches!(s.flavor, Flavor::X | Flavor::Xweighted)
            && s.s1 == 0.0
            && s.s2 == 0.0
            && s.b == 0.0
            && s.beta == 0.0
    }

    /// Adds `|F|^2` mass already integrated over tau (only valid for the plain `L^2` norm).
    pub fn add_l2_mass(&mut self, mass: f64) {
        debug_assert!(self.is_plain_l2());
        self.acc_x += mass * self.eta_measure;
    }

    pub fn begin_mode(&self, k: i64, eta: [f64; 2]) -> ModeScope {
        let s = &self.spec;
        let kf = k as f64;
        ModeScope {
            k_bracket: if s.beta == 0.0 {
                1.0
            } else {
                (1.0 + kf * kf).powf(0.5 * (self.params.alpha() + 1.0))
            },
            space: sobolev_weight(kf, eta, s.s1, s.s2),
            phase: self.params.phase_raw(k, eta[0] * eta[0] + eta[1] * eta[1]),
            x: 0.0,
            y_l1: 0.0,
        }
    }

    /// Adds tau values `values[i]` at lattice index `start + i`. Windows added
    /// to one scope must be disjoint.
    pub fn add_window(&self, scope: &mut ModeScope, start: i64, values: &[Complex64]) {
        let s = &self.spec;
        let x_b = match s.flavor {
            Flavor::Z => -0.5,
            _ => s.b,
        };
        let want_x = !matches!(s.flavor, Flavor::Y);
        let want_y = matches!(s.flavor, Flavor::Y | Flavor::Z);
        if want_x && x_b == 0.0 && s.beta == 0.0 && !want_y {
            scope.x += values.iter().map(|v| v.norm_sqr()).sum::<f64>();
            return;
        }
        for (i, v) in values.iter().enumerate() {
            let a2 = v.norm_sqr();
            if a2 == 0.0 {
                continue;
            }
            let sigma = (start + i as i64) as f64 * self.d_tau - scope.phase;
            let br2 = 1.0 + sigma * sigma;
            let lbr = 0.5 * br2.ln();
            // log of the extra weight (1 + <sigma>/<k>^{alpha+1})^beta
            let lw = if s.beta == 0.0 {
                0.0
            } else {
                s.beta * (1.0 + br2.sqrt() / scope.k_bracket).ln()
            };
            if want_x {
                scope.x += a2 * (2.0 * (x_b * lbr + lw)).exp();
            }
            if want_y {
                scope.y_l1 += a2.sqrt() * (lw - lbr).exp();
            }
        }
    }

    pub fn end_mode(&mut self, scope: ModeScope) {
        let w2 = scope.space * scope.space * self.eta_measure;
        self.acc_x += scope.x * self.d_tau * w2;
        let l1 = scope.y_l1 * self.d_tau;
        self.acc_y += l1 * l1 * w2;
    }

    /// Adds one spatial mode. Segments must be disjoint.
    pub fn add_mode(&mut self, k: i64, eta: [f64; 2], segments: &[TauSegment]) {
        if segments.is_empty() {
            return;
        }
        let mut scope = self.begin_mode(k, eta);
        for seg in segments {
            self.add_window(&mut scope, seg.start, &seg.values);
        }
        self.end_mode(scope);
    }

    /// Separate `(Y, Xweighted)` parts; only the relevant one is nonzero except for `Z`.
    pub fn parts(&self) -> (f64, f64) {
        (self.acc_y.sqrt(), self.acc_x.sqrt())
    }

    pub fn finish(&self) -> f64 {
        let (y, x) = self.parts();
        y + x
    }
}

/// Restriction norm of a stored field.
pub fn bourgain_norm(f: &SpaceTimeField, spec: &NormSpec, params: &DispersionParams) -> Result<f64> {
    if spec.flavor == Flavor::Mixed {
        return mixed_norm(f, spec.mixed_r, spec.mixed_p, spec.mixed_q);
    }
    let mut acc = ModeNormAccumulator::new(*spec, *params, f.grid())?;
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    let d = f.grid().d_eta();
    for m in f.modes() {
        acc.add_mode(m.k, [m.n[0] as f64 * d, m.n[1] as f64 * d], &m.segments);
    }
    Ok(acc.finish())
}

/// `|| F_x f ||` in `l^{r'}_k L^p_t L^q_y`, evaluated from time and y samples
/// with the rectangle rule.
pub fn mixed_norm(f: &SpaceTimeField, r: f64, p: f64, q: f64) -> Result<f64> {
    check_mixed_exponents(r, p, q)?;
    let g = *f.grid();
    let d = g.y_dims();
    let r_dual = if r == 1.0 { f64::INFINITY } else { r / (r - 1.0) };
    let n_extent = f
        .modes()
        .iter()
        .flat_map(|m| m.n.iter().copied())
        .map(|n| if n < 0 { -n } else { n + 1 })
        .max()
        .unwrap_or(1) as usize;
    let ny = (2 * n_extent).next_power_of_two().max(g.y_points());
    let ny2 = if d == 2 { ny } else { 1 };
    let dy = g.y_length() / ny as f64;
    let y_cell = dy.powi(d as i32);
    let spatial = (2.0 * PI).powf(-(d as f64) / 2.0) * g.eta_measure();
    let tp = g.t_points();
    let mut per_k: Vec<f64> = Vec::new();
    let modes = f.modes();
    let mut i = 0;
    while i < modes.len() {
        let k = modes[i].k;
        let mut j = i;
        // samples[t][y1][y2]
        let mut data = vec![Complex64::new(0.0, 0.0); tp * ny * ny2];
        while j < modes.len() && modes[j].k == k {
            let m = &modes[j];
            let f_t = f.mode_samples(m)?;
            let (i1, i2) = (m.n[0].rem_euclid(ny as i64) as usize, m.n[1].rem_euclid(ny2 as i64) as usize);
            let sgn = if (m.n[0] + m.n[1]) & 1 == 0 { spatial } else { -spatial };
            for (t, v) in f_t.iter().enumerate() {
                data[(t * ny + i1) * ny2 + i2] += v * sgn;
            }
            j += 1;
        }
        let fft = plan(ny, true);
        for t in 0..tp {
            let block = &mut data[t * ny * ny2..(t + 1) * ny * ny2];
            if d == 1 {
                fft.process(block);
            } else {
                super::transform::fft3(block, [1, ny, ny2], true);
            }
        }
        let dt = g.d_t();
        let mut lp_t = 0.0f64;
        for t in 0..tp {
            let block = &data[t * ny * ny2..(t + 1) * ny * ny2];
            let lq = lp(block.iter().map(|v| v.norm()), q, y_cell);
            lp_t = accumulate(lp_t, lq, p, dt);
        }
        per_k.push(finish_lp(lp_t, p));
        i = j;
    }
    let mut total = 0.0;
    for v in per_k {
        total = accumulate(total, v, r_dual, 1.0);
    }
    Ok(finish_lp(total, r_dual))
}

fn lp(values: impl Iterator<Item = f64>, p: f64, cell: f64) -> f64 {
    let mut acc = 0.0;
    for v in values {
        acc = accumulate(acc, v, p, cell);
    }
    finish_lp(acc, p)
}

#[inline]
fn accumulate(acc: f64, v: f64, p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        acc.max(v)
    } else {
        acc + v.powf(p) * cell
    }
}

#[inline]
fn finish_lp(acc: f64, p: f64) -> f64 {
    if p.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / p)
    }
}
