//! Derivatives of the data-to-solution map at zero data, and the cubic
//! growth experiment built on them.
//!
//! For `u(0) = delta w` and `u_t = L u - (u^2)_x / 2`, the derivatives
//! `U_j = d^j u / d delta^j` at `delta = 0` are
//!
//! * `U1 = e^{tL} w`
//! * `U2^(xi) = -i k c e^{it phase(xi)} sum w(xi1) w(xi2) int_0^t e^{i t' A} dt'`
//! * `U3^(xi) = -3 k (k1 + k2) c^2 e^{it phase(xi)} sum w(xi1) w(xi2) w(xi3) F(A, B)`
//!
//! with `c` the convolution constant of the coefficient normalization and
//! `F(A, B) = int_0^t e^{i t' B} int_0^{t'} e^{i s A} ds dt'`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};
use crate::estimates::adversarial::knapp_field;
use crate::estimates::fit::{fit_exponent, RatioSample, SampleMeta, ScalingFit};
use crate::evolution::free_evolve;
use crate::fields::{GridSpec, SpectralField};
use crate::symbols::{denom_a, denom_a_plus_b, denom_b, phi1, phi_functions, DispersionParams, FrequencyPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IllposedConfig {
    pub n: u64,
    /// Transverse support is `|eta| <= beta_interval N^{1/2}`.
    pub beta_interval: f64,
    pub s: f64,
    pub t: f64,
    pub eta_quad_points: usize,
}

impl IllposedConfig {
    pub fn new(n: u64, beta_interval: f64, s: f64, t: f64, eta_quad_points: usize) -> Result<Self> {
        let cfg = Self {
            n,
            beta_interval,
            s,
            t,
            eta_quad_points,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.n < 8 {
            v.push(Violation::new("n", format!("must be >= 8, got {}", self.n)));
        }
        if !(self.beta_interval > 0.0 && self.beta_interval <= 0.1) {
            v.push(Violation::new(
                "beta_interval",
                format!("must lie in (0, 0.1], got {}", self.beta_interval),
            ));
        }
        if !self.s.is_finite() || !self.t.is_finite() {
            v.push(Violation::new("s, t", "must be finite"));
        }
        if self.eta_quad_points < 32 {
            v.push(Violation::new(
                "eta_quad_points",
                format!("must be >= 32, got {}", self.eta_quad_points),
            ));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    pub fn half_width(&self) -> f64 {
        self.beta_interval * (self.n as f64).sqrt()
    }
}

/// Indicator of `k = +-N`, `|eta| <= beta_interval N^{1/2}` on the grid lattice.
pub fn build_wn(cfg: &IllposedConfig, grid: GridSpec) -> Result<SpectralField> {
    cfg.validate()?;
    let a = cfg.half_width();
    if a < grid.d_eta() {
        return Err(Error::BandExceedsGrid(format!(
            "half-width {a} is below the lattice spacing {}",
            grid.d_eta()
        )));
    }
    knapp_field(grid, cfg.n as i64, a)
}

/// Warning text when the indicator of `w_N` spans fewer than 8 cells of the grid lattice.
pub fn wn_resolution_warning(cfg: &IllposedConfig, grid: &GridSpec) -> Option<String> {
    let cells = 2.0 * cfg.half_width() / grid.d_eta();
    (cells < 8.0).then(|| format!("the w_N indicator spans only {cells:.1} lattice cells at N = {}", cfg.n))
}

/// `U1 = e^{it phase(D)} w`.
pub fn first_derivative(w: &SpectralField, t: f64, params: &DispersionParams) -> SpectralField {
    free_evolve(w, t, params)
}

/// `int_0^t e^{i t' a} dt'`.
fn time_integral(t: f64, a: f64) -> Complex64 {
    phi1(Complex64::new(0.0, t * a)) * t
}

/// `F(A, B) = (g(A + B) - g(B)) / (iA)` with `g(z) = int_0^t e^{i t' z} dt'`.
/// As `A -> 0` this is `g'(B) / i = t^2 (phi1 - phi2)(itB)`.
pub fn cubic_time_factor(t: f64, a: f64, b: f64, a_plus_b: f64) -> Complex64 {
    if (t * a).abs() < 1e-7 {
        let p = phi_functions(Complex64::new(0.0, t * b));
        return (p[1] - p[2]) * (t * t);
    }
    (time_integral(t, a_plus_b) - time_integral(t, b)) / Complex64::new(0.0, a)
}

fn point(grid: &GridSpec, k: i64, n: [i64; 2]) -> FrequencyPoint {
    let d = grid.d_eta();
    FrequencyPoint::new2(k, [n[0] as f64 * d, n[1] as f64 * d])
}

fn support(w: &SpectralField) -> Vec<(i64, [i64; 2], Complex64)> {
    w.support().filter(|(m, _)| m.k != 0).map(|(m, c)| (m.k, m.n, c)).collect()
}

/// `U2` on the grid lattice; outputs that leave the grid are dropped.
pub fn second_derivative(w: &SpectralField, t: f64, params: &DispersionParams) -> Result<SpectralField> {
    let g = *w.grid();
    let conv = g.space_constant() * g.eta_measure();
    let sup = support(w);
    let mut out = SpectralField::zeros(g);
    for &(k1, n1, c1) in &sup {
        for &(k2, n2, c2) in &sup {
            let k = k1 + k2;
            let n = [n1[0] + n2[0], n1[1] + n2[1]];
            if k == 0 {
                continue;
            }
            let Some(i) = out.index_of(k, n) else { continue };
            let a = denom_a(params, &point(&g, k1, n1), &point(&g, k2, n2))?;
            out.coeffs_mut()[i] += Complex64::new(0.0, -(k as f64) * conv) * c1 * c2 * time_integral(t, a);
        }
    }
    Ok(free_evolve(&out, t, params))
}

/// `U3` on the grid lattice by direct triple summation over the support of `w`.
pub fn third_derivative(w: &SpectralField, t: f64, params: &DispersionParams) -> Result<SpectralField> {
    let g = *w.grid();
    let conv = g.space_constant() * g.eta_measure();
    let sup = support(w);
    let mut out = SpectralField::zeros(g);
    for &(k1, n1, c1) in &sup {
        for &(k2, n2, c2) in &sup {
            if k1 + k2 == 0 {
                continue;
            }
            let (x1, x2) = (point(&g, k1, n1), point(&g, k2, n2));
            let a = denom_a(params, &x1, &x2)?;
            for &(k3, n3, c3) in &sup {
                let k = k1 + k2 + k3;
                let n = [n1[0] + n2[0] + n3[0], n1[1] + n2[1] + n3[1]];
                if k == 0 {
                    continue;
                }
                let Some(i) = out.index_of(k, n) else { continue };
                let x3 = point(&g, k3, n3);
                let b = denom_b(params, &x1, &x2, &x3)?;
                let ab = denom_a_plus_b(params, &x1, &x2, &x3)?;
                let weight = -3.0 * k as f64 * (k1 + k2) as f64 * conv * conv;
                out.coeffs_mut()[i] += c1 * c2 * c3 * cubic_time_factor(t, a, b, ab) * weight;
            }
        }
    }
    Ok(free_evolve(&out, t, params))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThirdDerivativeNorm {
    /// `||U3||_{H^s}` over every output frequency.
    pub total: f64,
    /// The part carried by `k = +-N`.
    pub restricted: f64,
    /// `||w_N||_{H^s}` on the same transverse lattice.
    pub wn_norm: f64,
}

fn bracket_pow(k: f64, s: f64) -> f64 {
    (1.0 + k * k).powf(0.5 * s)
}

/// `||w_N||_{H^s}` for the indicator of width `2 beta N^{1/2}`.
pub fn wn_norm(cfg: &IllposedConfig) -> f64 {
    (2.0 * 2.0 * cfg.half_width()).sqrt() * bracket_pow(cfg.n as f64, cfg.s)
}

/// `||U3(t)||_{H^s}` for `w = w_N`, with the transverse integrals done by the
/// midpoint rule on `eta_quad_points` cells across the indicator.
///
/// Only `k_j = +-N` with `k1 = k2` survive, one sign pattern per output `k`.
/// For each output `eta` the double sum over `(eta1, eta2)` runs over the
/// cells whose third frequency `eta - eta1 - eta2` is again a cell.
pub fn third_derivative_norm(cfg: &IllposedConfig, params: &DispersionParams) -> Result<ThirdDerivativeNorm> {
    cfg.validate()?;
    let m = cfg.eta_quad_points;
    let a = cfg.half_width();
    let h = 2.0 * a / m as f64;
    let node = |i: usize| -a + (i as f64 + 0.5) * h;
    let conv = (2.0 * std::f64::consts::PI).powf(-1.0) * h;
    let n = cfg.n as i64;
    let mut total = 0.0;
    let mut restricted = 0.0;
    for (k1, k3) in [(n, n), (n, -n), (-n, -n), (-n, n)] {
        let k = 2 * k1 + k3;
        let weight = -3.0 * k as f64 * (2 * k1) as f64 * conv * conv;
        let mut mass = 0.0;
        for j in 0..(3 * m - 2) {
            let mut acc = Complex64::new(0.0, 0.0);
            for i1 in 0..m {
                let x1 = FrequencyPoint::new(k1, node(i1));
                // i3 = j - i1 - i2 must lie in [0, m).
                let lo = (j as i64 - i1 as i64 - (m as i64 - 1)).max(0) as usize;
                let hi = (j as i64 - i1 as i64).min(m as i64 - 1);
                if hi < lo as i64 {
                    continue;
                }
                for i2 in lo..=hi as usize {
                    let x2 = FrequencyPoint::new(k1, node(i2));
                    let x3 = FrequencyPoint::new(k3, node(j - i1 - i2));
                    let da = denom_a(params, &x1, &x2)?;
                    let db = denom_b(params, &x1, &x2, &x3)?;
                    let dab = denom_a_plus_b(params, &x1, &x2, &x3)?;
                    acc += cubic_time_factor(cfg.t, da, db, dab);
                }
            }
            mass += (acc * weight).norm_sqr() * h;
        }
        let contribution = bracket_pow(k as f64, 2.0 * cfg.s) * mass;
        total += contribution;
        if k.abs() == n {
            restricted += contribution;
        }
    }
    Ok(ThirdDerivativeNorm {
        total: total.sqrt(),
        restricted: restricted.sqrt(),
        wn_norm: wn_norm(cfg),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmoothnessVerdict {
    C3Fails,
    NoFailureDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IllposedReport {
    /// Fit of `||U3||_{H^s} / ||w_N||^3_{H^s}`.
    pub fit: ScalingFit,
    /// Fit of the restricted quotient.
    pub restricted_fit: ScalingFit,
    /// Fit of `||w_N||_{H^s}` alone.
    pub wn_fit: ScalingFit,
    /// `3/2 - alpha - 2 s`.
    pub predicted: f64,
    pub verdict: SmoothnessVerdict,
    pub norms: Vec<ThirdDerivativeNorm>,
}

/// Growth of the cubic quotient over a sweep of `N` sharing `s`, `t` and `beta`.
pub fn illposed_scaling(cfgs: &[IllposedConfig], params: &DispersionParams) -> Result<IllposedReport> {
    if cfgs.len() < 4 {
        return Err(Error::InsufficientSpan(format!("{} values of N, at least 4 needed", cfgs.len())));
    }
    let norms = cfgs
        .iter()
        .map(|c| third_derivative_norm(c, params))
        .collect::<Result<Vec<_>>>()?;
    illposed_report(cfgs, norms, params)
}

/// Fits and verdict from norms already computed for `cfgs`, in the same order.
pub fn illposed_report(
    cfgs: &[IllposedConfig],
    norms: Vec<ThirdDerivativeNorm>,
    params: &DispersionParams,
) -> Result<IllposedReport> {
    if cfgs.len() != norms.len() || cfgs.is_empty() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} norms", cfgs.len()),
            found: norms.len().to_string(),
        });
    }
    let s = cfgs[0].s;
    let meta = |c: &IllposedConfig| SampleMeta {
        s1: c.s,
        beta: c.beta_interval,
        alpha: params.alpha(),
        kind: "wn".into(),
        ..SampleMeta::default()
    };
    let series = |value: &dyn Fn(&ThirdDerivativeNorm) -> f64| -> Vec<RatioSample> {
        cfgs.iter()
            .zip(&norms)
            .map(|(c, r)| RatioSample {
                n: c.n,
                value: value(r),
                meta: meta(c),
            })
            .collect()
    };
    let fit = fit_exponent(&series(&|r| r.total / r.wn_norm.powi(3)))?;
    let restricted_fit = fit_exponent(&series(&|r| r.restricted / r.wn_norm.powi(3)))?;
    let wn_fit = fit_exponent(&series(&|r| r.wn_norm))?;
    let verdict = if fit.exponent > 0.1 {
        SmoothnessVerdict::C3Fails
    } else {
        SmoothnessVerdict::NoFailureDetected
    };
    Ok(IllposedReport {
        fit,
        restricted_fit,
        wn_fit,
        predicted: 1.5 - params.alpha() - 2.0 * s,
        verdict,
        norms,
    })
}
