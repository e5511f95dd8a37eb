//! Fixed-point iteration of the time-localized Duhamel formula
//!
//! ```text
//! u_{n+1}(t) = psi_1(t) e^{i t phase} u0 + psi_T(t) int_0^t e^{i (t - s) phase} N(psi_T u_n)(s) ds
//! ```
//!
//! on the lattice `t_i = i T / M`, with `N(w) = -(1/2) d_x (w^2)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::CutoffSpec;
use super::free::mode_phase;
use super::nonlinear::nonlinearity;
use crate::error::{Error, Result, Violation};
use crate::fields::SpectralField;
use crate::symbols::DispersionParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PicardOptions {
    /// Intervals of the time lattice on `[0, T]`.
    pub t_steps: usize,
    pub dealias: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        Self {
            t_steps: 64,
            dealias: 2.0 / 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub times: Vec<f64>,
    /// Final iterate at every lattice time.
    pub iterate: Vec<SpectralField>,
    /// `max_t || u_n(t) - u_{n-1}(t) ||_{L^2}` for `n = 1..=iters`, with `u_0 = 0`.
    pub diffs: Vec<f64>,
}

/// Running integral `int_0^{t_j} g` for every lattice point, fourth order:
/// Simpson for even `j`, Simpson plus a three-eighths panel for odd `j >= 3`,
/// and a cubic-fit rule on the first interval.
pub fn cumulative_integral(g: &[Complex64], h: f64) -> Vec<Complex64> {
    let m = g.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; m];
    if m < 2 {
        return out;
    }
    if m < 4 {
        for j in 1..m {
            out[j] = out[j - 1] + (g[j - 1] + g[j]) * (h / 2.0);
        }
        return out;
    }
    let mut even = zero;
    for j in (2..m).step_by(2) {
        even += (g[j - 2] + g[j - 1] * 4.0 + g[j]) * (h / 3.0);
        out[j] = even;
    }
    out[1] = (g[0] * 9.0 + g[1] * 19.0 - g[2] * 5.0 + g[3]) * (h / 24.0);
    for j in (3..m).step_by(2) {
        let three_eighths = (g[j - 3] + g[j - 2] * 3.0 + g[j - 1] * 3.0 + g[j]) * (3.0 * h / 8.0);
        out[j] = out[j - 3] + three_eighths;
    }
    out
}

pub fn picard_solve(
    f: &SpectralField,
    cutoff: CutoffSpec,
    iters: usize,
    params: &DispersionParams,
    opts: &PicardOptions,
) -> Result<PicardResult> {
    let mut v = Vec::new();
    if iters < 1 {
        v.push(Violation::new("iters", "must be >= 1"));
    }
    if opts.t_steps < 4 {
        v.push(Violation::new("t_steps", "must be >= 4"));
    }
    if !(opts.dealias > 0.0 && opts.dealias <= 1.0) {
        v.push(Violation::new("dealias", "need 0 < dealias <= 1"));
    }
    if !v.is_empty() {
        return Err(Error::InvalidSpec(v));
    }
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    let g = *f.grid();
    let t_final = cutoff.t_scale;
    let m = opts.t_steps;
    let h = t_final / m as f64;
    let times: Vec<f64> = (0..=m).map(|i| i as f64 * h).collect();
    let unit = CutoffSpec { t_scale: 1.0 };
    let phases: Vec<f64> = f.modes().map(|md| mode_phase(params, &g, md.k, md.n)).collect();
    let rotate = |u: &SpectralField, t: f64, scale: f64| -> SpectralField {
        let mut out = u.clone();
        for (c, ph) in out.coeffs_mut().iter_mut().zip(&phases) {
            *c *= Complex64::from_polar(scale, t * ph);
        }
        out
    };
    let free: Vec<SpectralField> = times.iter().map(|t| rotate(f, *t, unit.eval(*t))).collect();

    let mut current: Vec<SpectralField> = vec![SpectralField::zeros(g); m + 1];
    let mut diffs = Vec::with_capacity(iters);
    let mut growth = 0usize;
    let scale_floor = 1e-12 * f.l2_norm();
    for it in 1..=iters {
        // Pulled-back forcing e^{-i s phase} N(psi_T u_n)(s).
        let forcing: Vec<SpectralField> = times
            .iter()
            .zip(&current)
            .map(|(t, u)| {
                let psi = cutoff.eval(*t);
                let nl = nonlinearity(u, opts.dealias);
                rotate(&nl, -t, psi * psi)
            })
            .collect();
        let mut next = Vec::with_capacity(m + 1);
        let len = f.coeffs().len();
        let mut integral: Vec<Vec<Complex64>> = vec![Vec::new(); m + 1];
        for i in 0..len {
            let lane: Vec<Complex64> = forcing.iter().map(|s| s.coeffs()[i]).collect();
            for (j, v) in cumulative_integral(&lane, h).into_iter().enumerate() {
                integral[j].push(v);
            }
        }
        for (j, t) in times.iter().enumerate() {
            let duhamel = SpectralField::from_coeffs(g, std::mem::take(&mut integral[j]))?;
            let pushed = rotate(&duhamel, *t, cutoff.eval(*t));
            next.push(free[j].add(&pushed)?);
        }
        let diff = next
            .iter()
            .zip(&current)
            .map(|(a, b)| a.sub(b).map(|d| d.l2_norm()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if let Some(&prev) = diffs.last() {
            if diff > prev && diff > scale_floor {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::Divergence { iteration: it });
                }
            } else {
                growth = 0;
            }
        }
        diffs.push(diff);
        current = next;
    }
    Ok(PicardResult {
        times,
        iterate: current,
        diffs,
    })
}
