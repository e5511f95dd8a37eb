use num_complex::Complex64;

use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Fourier coefficients `u_hat(k, eta)` on the grid lattice.
///
/// Storage is row-major over `(k, n1, n2)` with `k + k_max`, `n1 + P/2` and
/// `n2 + P/2` as indices (`n2` is absent when the transverse dimension is
/// one). The normalization is unitary: `u(x, y)` is recovered as
/// `(2 pi)^{-(1+d)/2} sum_k sum_n d_eta^d u_hat e^{i(kx + eta y)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// One lattice mode: x-frequency, transverse indices and flat storage index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub k: i64,
    pub n: [i64; 2],
    pub index: usize,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.mode_count()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.mode_count() {
            return Err(Error::ShapeMismatch {
                expected: grid.mode_count().to_string(),
                found: coeffs.len().to_string(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Flat index of `(k, n)`, or `None` off the lattice.
    pub fn index_of(&self, k: i64, n: [i64; 2]) -> Option<usize> {
        let g = &self.grid;
        let km = g.k_max() as i64;
        let half = g.y_points() as i64 / 2;
        if k.abs() > km || n[0] < -half || n[0] >= half {
            return None;
        }
        let i2 = if g.y_dims() == 2 {
            if n[1] < -half || n[1] >= half {
                return None;
            }
            (n[1] + half) as usize
        } else if n[1] != 0 {
            return None;
        } else {
            0
        };
        let i1 = (n[0] + half) as usize;
        Some(((k + km) as usize * g.y_points() + i1) * g.y_points2() + i2)
    }

    pub fn get(&self, k: i64, n: [i64; 2]) -> Complex64 {
        self.index_of(k, n)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn set(&mut self, k: i64, n: [i64; 2], v: Complex64) -> Result<()> {
        let i = self
            .index_of(k, n)
            .ok_or_else(|| Error::BandExceedsGrid(format!("mode (k = {k}, n = {n:?}) is off the grid")))?;
        self.coeffs[i] = v;
        Ok(())
    }

    /// Transverse frequency of lattice indices `n`.
    pub fn eta(&self, n: [i64; 2]) -> [f64; 2] {
        let d = self.grid.d_eta();
        [n[0] as f64 * d, n[1] as f64 * d]
    }

    /// Every lattice mode in storage order.
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        let g = self.grid;
        let km = g.k_max() as i64;
        let half = g.y_points() as i64 / 2;
        let (p1, p2) = (g.y_points(), g.y_points2());
        (0..self.coeffs.len()).map(move |index| {
            let i2 = index % p2;
            let i1 = (index / p2) % p1;
            let ik = index / (p1 * p2);
            let n2 = if g.y_dims() == 2 { i2 as i64 - half } else { 0 };
            Mode {
                k: ik as i64 - km,
                n: [i1 as i64 - half, n2],
                index,
            }
        })
    }

    /// Modes with a nonzero coefficient.
    pub fn support(&self) -> impl Iterator<Item = (Mode, Complex64)> + '_ {
        self.modes()
            .map(move |m| (m, self.coeffs[m.index]))
            .filter(|(_, c)| c.re != 0.0 || c.im != 0.0)
    }

    pub fn is_mean_zero(&self) -> bool {
        self.support().all(|(m, _)| m.k != 0)
    }

    /// Zeroes the `k = 0` plane.
    pub fn project_mean_zero(&self) -> Self {
        let mut out = self.clone();
        let idx: Vec<usize> = self.modes().filter(|m| m.k == 0).map(|m| m.index).collect();
        for i in idx {
            out.coeffs[i] = Complex64::new(0.0, 0.0);
        }
        out
    }

    /// Zeroes every mode carrying the unpaired index `n = -P/2` on some axis.
    pub fn drop_nyquist(&mut self) {
        let half = self.grid.y_points() as i64 / 2;
        let two_d = self.grid.y_dims() == 2;
        let idx: Vec<usize> = self
            .modes()
            .filter(|m| m.n[0] == -half || (two_d && m.n[1] == -half))
            .map(|m| m.index)
            .collect();
        for i in idx {
            self.coeffs[i] = Complex64::new(0.0, 0.0);
        }
    }

    /// `(sum_k d_eta^d sum_n <k>^{2 s1} <eta>^{2 s2} |u_hat|^2)^{1/2}`.
    pub fn sobolev_norm(&self, s1: f64, s2: f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in self.support() {
            let w = sobolev_weight(m.k as f64, self.eta(m.n), s1, s2);
            acc += w * w * c.norm_sqr();
        }
        (acc * self.grid.eta_measure()).sqrt()
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0, 0.0)
    }

    /// Real-space inner product `<self, other>_{L^2}` (conjugate-linear in `self`).
    pub fn inner(&self, other: &SpectralField) -> Complex64 {
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum();
        s * self.grid.eta_measure()
    }

    /// Largest `|u_hat(-k, -n) - conj(u_hat(k, n))|` over pairs inside the lattice.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for m in self.modes() {
            if let Some(j) = self.index_of(-m.k, [-m.n[0], -m.n[1]]) {
                worst = worst.max((self.coeffs[j] - self.coeffs[m.index].conj()).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub(crate) fn check_same_grid(&self, other: &SpectralField) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch {
                expected: format!("{:?}", self.grid.params()),
                found: format!("{:?}", other.grid.params()),
            });
        }
        Ok(())
    }
}

/// `<k>^{s1} <eta>^{s2}` with the Japanese bracket `<x> = (1 + |x|^2)^{1/2}`.
#[inline]
pub fn sobolev_weight(k: f64, eta: [f64; 2], s1: f64, s2: f64) -> f64 {
    let wk = if s1 == 0.0 { 1.0 } else { (1.0 + k * k).powf(0.5 * s1) };
    let we = if s2 == 0.0 {
        1.0
    } else {
        (1.0 + eta[0] * eta[0] + eta[1] * eta[1]).powf(0.5 * s2)
    };
    wk * we
}

/// Free function form of [`SpectralField::project_mean_zero`].
pub fn project_mean_zero(f: &SpectralField) -> SpectralField {
    f.project_mean_zero()
}

/// Free function form of [`SpectralField::sobolev_norm`].
pub fn sobolev_norm(f: &SpectralField, s1: f64, s2: f64) -> f64 {
    f.sobolev_norm(s1, s2)
}
