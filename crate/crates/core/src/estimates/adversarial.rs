//! Data pairs realizing the frequency interactions that bind the bilinear estimates.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{random_field, BandSpec, GridSpec, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairKind {
    /// Both factors random in `N <= |k| <= 2N`.
    Comparable,
    /// `u` on `k in [N, 2N]`, `v` on `k in [-2N, -N]`: output at `|k| <= N`.
    HighHighToLow,
    /// `u` at `|k| <= 2`, `v` random in `N <= |k| <= 2N`.
    LowHigh,
    /// Both factors the indicator of `k = +-N`, `|eta| <= c N^{1/2}`.
    Knapp,
}

impl PairKind {
    pub fn name(&self) -> &'static str {
        match self {
            PairKind::Comparable => "comparable",
            PairKind::HighHighToLow => "high-high-to-low",
            PairKind::LowHigh => "low-high",
            PairKind::Knapp => "knapp",
        }
    }
}

/// Transverse extent of the generated data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairShape {
    /// Half-width of the random transverse band.
    pub eta_max: f64,
    /// `c` in the Knapp half-width `c N^{1/2}`.
    pub knapp_coeff: f64,
}

impl Default for PairShape {
    fn default() -> Self {
        Self {
            eta_max: 0.25,
            knapp_coeff: 0.5,
        }
    }
}

fn splitmix(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Complex Gaussian data on `k_lo <= k <= k_hi` (signed), no symmetry.
fn one_sided(grid: GridSpec, k_lo: i64, k_hi: i64, eta_max: f64, seed: u64) -> Result<SpectralField> {
    BandSpec { k_lo: k_lo.abs().min(k_hi.abs()).max(1), k_hi: k_lo.abs().max(k_hi.abs()), eta_max, amplitude: 1.0 }
        .check(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    let modes: Vec<_> = f.modes().collect();
    let tol = 1e-12 * (1.0 + eta_max);
    let half = grid.y_points() as i64 / 2;
    for m in modes {
        let eta = f.eta(m.n);
        if m.k < k_lo || m.k > k_hi || m.n[0] == -half || (grid.y_dims() == 2 && m.n[1] == -half) {
            continue;
        }
        if eta[0].abs() > eta_max + tol || eta[1].abs() > eta_max + tol {
            continue;
        }
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        f.coeffs_mut()[m.index] = Complex64::new(re, im) / 2f64.sqrt();
    }
    Ok(f)
}

/// Indicator of `k = +-n`, `|eta_j| <= width` (real in physical space).
pub fn knapp_field(grid: GridSpec, n: i64, width: f64) -> Result<SpectralField> {
    BandSpec { k_lo: n, k_hi: n, eta_max: width, amplitude: 1.0 }.check(&grid)?;
    let mut f = SpectralField::zeros(grid);
    let modes: Vec<_> = f.modes().collect();
    let tol = 1e-12 * (1.0 + width);
    let half = grid.y_points() as i64 / 2;
    for m in modes {
        let eta = f.eta(m.n);
        if m.k.abs() != n || m.n[0] == -half || (grid.y_dims() == 2 && m.n[1] == -half) {
            continue;
        }
        if eta[0].abs() <= width + tol && eta[1].abs() <= width + tol {
            f.coeffs_mut()[m.index] = Complex64::new(1.0, 0.0);
        }
    }
    Ok(f)
}

/// Deterministic pair of the requested interaction type at scale `n`.
pub fn adversarial_pair(
    kind: PairKind,
    n: i64,
    grid: GridSpec,
    seed: u64,
    shape: &PairShape,
) -> Result<(SpectralField, SpectralField)> {
    if n < 1 {
        return Err(Error::BandExceedsGrid(format!("N must be positive, got {n}")));
    }
    let (su, sv) = (splitmix(seed, 1), splitmix(seed, 2));
    let band = |lo, hi| BandSpec { k_lo: lo, k_hi: hi, eta_max: shape.eta_max, amplitude: 1.0 };
    match kind {
        PairKind::Comparable => Ok((
            random_field(grid, &band(n, 2 * n), su)?,
            random_field(grid, &band(n, 2 * n), sv)?,
        )),
        PairKind::HighHighToLow => Ok((
            one_sided(grid, n, 2 * n, shape.eta_max, su)?,
            one_sided(grid, -2 * n, -n, shape.eta_max, sv)?,
        )),
        PairKind::LowHigh => Ok((
            random_field(grid, &band(1, 2), su)?,
            random_field(grid, &band(n, 2 * n), sv)?,
        )),
        PairKind::Knapp => {
            let f = knapp_field(grid, n, shape.knapp_coeff * (n as f64).sqrt())?;
            Ok((f.clone(), f))
        }
    }
}
