use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::grid::GridSpec;
use super::spectral::SpectralField;
use crate::error::{Error, Result};

/// Spectral support of random data: `k_lo <= |k| <= k_hi`, `|eta_j| <= eta_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSpec {
    pub k_lo: i64,
    pub k_hi: i64,
    pub eta_max: f64,
    #[serde(default = "unit")]
    pub amplitude: f64,
}

fn unit() -> f64 {
    1.0
}

impl BandSpec {
    pub fn check(&self, grid: &GridSpec) -> Result<()> {
        if self.k_lo < 1 || self.k_hi < self.k_lo {
            return Err(Error::BandExceedsGrid(format!(
                "need 1 <= k_lo <= k_hi, got [{}, {}]",
                self.k_lo, self.k_hi
            )));
        }
        if self.k_hi > grid.k_max() as i64 {
            return Err(Error::BandExceedsGrid(format!(
                "k_hi = {} exceeds k_max = {}",
                self.k_hi,
                grid.k_max()
            )));
        }
        let top = grid.n_max() as f64 * grid.d_eta();
        if !(self.eta_max >= 0.0) || self.eta_max > top * (1.0 + 1e-12) {
            return Err(Error::BandExceedsGrid(format!(
                "eta_max = {} exceeds the lattice limit {top}",
                self.eta_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, k: i64, eta: [f64; 2]) -> bool {
        let tol = 1e-12 * (1.0 + self.eta_max);
        (self.k_lo..=self.k_hi).contains(&k.abs())
            && eta[0].abs() <= self.eta_max + tol
            && eta[1].abs() <= self.eta_max + tol
    }
}

/// Gaussian coefficients in the band with Hermitian symmetry, so the field is real.
/// The same `(grid, band, seed)` always produces the same field.
pub fn random_field(grid: GridSpec, band: &BandSpec, seed: u64) -> Result<SpectralField> {
    band.check(&grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = SpectralField::zeros(grid);
    let scale = band.amplitude / 2f64.sqrt();
    let modes: Vec<_> = f.modes().filter(|m| m.k > 0).collect();
    for m in modes {
        if !band.contains(m.k, f.eta(m.n)) {
            continue;
        }
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let c = Complex64::new(re, im) * scale;
        f.coeffs_mut()[m.index] = c;
        let j = f
            .index_of(-m.k, [-m.n[0], -m.n[1]])
            .expect("band excludes the unpaired transverse mode");
        f.coeffs_mut()[j] = c.conj();
    }
    Ok(f)
}
