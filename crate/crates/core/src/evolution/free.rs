//! Free flow `e^{i t phase(D)}` and its time-localized space-time blocks.

use num_complex::Complex64;

use super::cutoff::CutoffSpec;
use crate::error::{Error, Result};
use crate::fields::spacetime::{segment_from_signal, SpaceTimeField, SpaceTimeMode, TimeSignal};
use crate::fields::{GridSpec, SpectralField};
use crate::symbols::DispersionParams;

/// Phase of a lattice mode, with `0` for the inert `k = 0` modes.
pub(crate) fn mode_phase(params: &DispersionParams, grid: &GridSpec, k: i64, n: [i64; 2]) -> f64 {
    if k == 0 {
        return 0.0;
    }
    let d = grid.d_eta();
    let (e1, e2) = (n[0] as f64 * d, n[1] as f64 * d);
    params.phase_raw(k, e1 * e1 + e2 * e2)
}

/// Multiplies every coefficient by `e^{i t phase}`. `k = 0` content is left unchanged.
pub fn free_evolve(f: &SpectralField, t: f64, params: &DispersionParams) -> SpectralField {
    let g = *f.grid();
    let mut out = f.clone();
    let support: Vec<_> = f.support().collect();
    for (m, c) in support {
        let ph = mode_phase(params, &g, m.k, m.n);
        out.coeffs_mut()[m.index] = c * Complex64::from_polar(1.0, t * ph);
    }
    out
}

/// Time profile multiplying the free solution on the window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeProfile {
    /// A smooth cutoff `psi_T`.
    Cutoff(CutoffSpec),
    /// 1 on the inner 90% of the window with a raised-cosine roll-off.
    Taper,
    /// No localization at all.
    Unit,
}

impl TimeProfile {
    pub fn eval(&self, t: f64, window: f64) -> f64 {
        match self {
            TimeProfile::Cutoff(c) => c.eval(t),
            TimeProfile::Unit => 1.0,
            TimeProfile::Taper => {
                let edge = 0.9 * window;
                let a = t.abs();
                if a <= edge {
                    1.0
                } else if a >= window {
                    0.0
                } else {
                    0.5 * (1.0 + (std::f64::consts::PI * (a - edge) / (window - edge)).cos())
                }
            }
        }
    }
}

/// Time signal of one lattice mode of a free block.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSignal {
    pub k: i64,
    pub n: [i64; 2],
    pub signal: TimeSignal,
}

/// Samples `profile(t) e^{i t phase} f_hat` for every nonzero mode, split into
/// the nearest lattice carrier and a slowly rotating envelope.
pub fn free_signals(
    f: &SpectralField,
    profile: TimeProfile,
    params: &DispersionParams,
) -> Result<Vec<ModeSignal>> {
    let g = *f.grid();
    if let TimeProfile::Cutoff(c) = profile {
        if c.support() > g.t_window() * (1.0 + 1e-12) {
            return Err(Error::WindowTooSmall {
                support: c.support(),
                window: g.t_window(),
            });
        }
    }
    if !f.is_mean_zero() {
        return Err(Error::NotMeanZero);
    }
    let times = g.times();
    let prof: Vec<f64> = times.iter().map(|t| profile.eval(*t, g.t_window())).collect();
    let d_tau = g.d_tau();
    let mut out = Vec::new();
    for (m, c) in f.support() {
        let ph = mode_phase(params, &g, m.k, m.n);
        let center = (ph / d_tau).round();
        let delta = ph - center * d_tau;
        let envelope = times
            .iter()
            .zip(&prof)
            .map(|(t, p)| c * Complex64::from_polar(*p, t * delta))
            .collect();
        out.push(ModeSignal {
            k: m.k,
            n: m.n,
            signal: TimeSignal {
                center: center as i64,
                envelope,
            },
        });
    }
    Ok(out)
}

/// Space-time coefficients of `psi(t) e^{i t phase(D)} f`; without a cutoff
/// the window taper stands in for it.
pub fn free_block(
    f: &SpectralField,
    cutoff: Option<CutoffSpec>,
    params: &DispersionParams,
) -> Result<SpaceTimeField> {
    let profile = cutoff.map(TimeProfile::Cutoff).unwrap_or(TimeProfile::Taper);
    let g = *f.grid();
    let modes = free_signals(f, profile, params)?
        .into_iter()
        .map(|s| {
            Ok(SpaceTimeMode {
                k: s.k,
                n: s.n,
                segments: vec![segment_from_signal(&g, &s.signal)?],
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpaceTimeField::new(g, modes))
}
