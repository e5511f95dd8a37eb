//! Discrete Fourier transforms between lattice coefficients and samples.
//!
//! Physical samples sit at `x_j = 2 pi j / nx` and `y_m = -L/2 + m L / ny`.
//! Because the y-box is centred, mode `n` picks up the phase `(-1)^n`
//! relative to a plain DFT. Padded transforms (`nx > 2 k_max + 1`,
//! `ny > P`) sample the same trigonometric polynomial more finely.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;
use super::spectral::SpectralField;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized in-place FFT of a row-major 3-D array along every axis of length > 1.
pub(crate) fn fft3(data: &mut [Complex64], dims: [usize; 3], inverse: bool) {
    debug_assert_eq!(data.len(), dims[0] * dims[1] * dims[2]);
    let strides = [dims[1] * dims[2], dims[2], 1];
    let mut lane = Vec::new();
    for axis in 0..3 {
        let len = dims[axis];
        if len < 2 {
            continue;
        }
        let fft = plan(len, inverse);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        if axis == 2 {
            for chunk in data.chunks_exact_mut(len) {
                fft.process_with_scratch(chunk, &mut scratch);
            }
            continue;
        }
        lane.resize(len, Complex64::new(0.0, 0.0));
        let stride = strides[axis];
        let outer = data.len() / (len * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * len * stride + inner;
                for (i, v) in lane.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut lane, &mut scratch);
                for (i, v) in lane.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

#[inline]
fn wrap(i: i64, n: usize) -> usize {
    i.rem_euclid(n as i64) as usize
}

#[inline]
fn sign(n: i64) -> f64 {
    if n & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Samples of a field on an `nx x ny (x ny)` physical lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField {
    grid: GridSpec,
    dims: [usize; 3],
    values: Vec<Complex64>,
}

impl PhysicalField {
    pub fn new(grid: GridSpec, dims: [usize; 3], values: Vec<Complex64>) -> Result<Self> {
        let ny2 = if grid.y_dims() == 2 { dims[1] } else { 1 };
        if dims[2] != ny2 || values.len() != dims.iter().product::<usize>() {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}x{}", dims[0], dims[1], ny2),
                found: format!("{:?} with {} values", dims, values.len()),
            });
        }
        Ok(Self { grid, dims, values })
    }

    /// Samples a function of `(x, y1, y2)` on the unpadded lattice of `grid`.
    pub fn sample(grid: GridSpec, f: impl Fn(f64, [f64; 2]) -> Complex64) -> Self {
        let dims = [grid.x_points(), grid.y_points(), grid.y_points2()];
        let (x, y) = lattice_coords(&grid, dims);
        let mut values = Vec::with_capacity(dims.iter().product());
        for xi in &x {
            for y1 in &y {
                if dims[2] == 1 {
                    values.push(f(*xi, [*y1, 0.0]));
                } else {
                    for y2 in &y {
                        values.push(f(*xi, [*y1, *y2]));
                    }
                }
            }
        }
        Self { grid, dims, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Quadrature weight of one sample: `(2 pi / nx) (L / ny)^d`.
    pub fn cell_measure(&self) -> f64 {
        let dy = self.grid.y_length() / self.dims[1] as f64;
        2.0 * std::f64::consts::PI / self.dims[0] as f64 * dy.powi(self.grid.y_dims() as i32)
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_measure()).sqrt()
    }

    /// Largest imaginary part relative to the largest modulus.
    pub fn max_imag_ratio(&self) -> f64 {
        let big = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if big == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / big
    }
}

/// x and y sample coordinates of a physical lattice.
pub fn lattice_coords(grid: &GridSpec, dims: [usize; 3]) -> (Vec<f64>, Vec<f64>) {
    let x = (0..dims[0])
        .map(|j| 2.0 * std::f64::consts::PI * j as f64 / dims[0] as f64)
        .collect();
    let dy = grid.y_length() / dims[1] as f64;
    let y = (0..dims[1])
        .map(|m| -grid.y_length() / 2.0 + m as f64 * dy)
        .collect();
    (x, y)
}

/// Default sample dimensions of a grid.
pub fn natural_dims(grid: &GridSpec) -> [usize; 3] {
    [grid.x_points(), grid.y_points(), grid.y_points2()]
}

/// Samples the trigonometric polynomial of `f` on a `nx x ny` lattice (`ny` per y-axis).
pub fn to_physical_dims(f: &SpectralField, nx: usize, ny: usize) -> Result<PhysicalField> {
    let g = *f.grid();
    if nx < g.x_points() || ny < g.y_points() {
        return Err(Error::ShapeMismatch {
            expected: format!("at least {}x{}", g.x_points(), g.y_points()),
            found: format!("{nx}x{ny}"),
        });
    }
    let ny2 = if g.y_dims() == 2 { ny } else { 1 };
    let dims = [nx, ny, ny2];
    let mut data = vec![Complex64::new(0.0, 0.0); nx * ny * ny2];
    let scale = g.space_constant() * g.eta_measure();
    for (m, c) in f.support() {
        let i = (wrap(m.k, nx) * ny + wrap(m.n[0], ny)) * ny2 + wrap(m.n[1], ny2);
        data[i] = c * (scale * sign(m.n[0] + m.n[1]));
    }
    fft3(&mut data, dims, true);
    PhysicalField::new(g, dims, data)
}

/// Inverse of [`to_physical_dims`], keeping the modes that fit the grid.
pub fn to_spectral(u: &PhysicalField) -> Result<SpectralField> {
    let g = *u.grid();
    let dims = u.dims();
    if dims[0] < g.x_points() || dims[1] < g.y_points() {
        return Err(Error::ShapeMismatch {
            expected: format!("at least {}x{}", g.x_points(), g.y_points()),
            found: format!("{}x{}", dims[0], dims[1]),
        });
    }
    let mut data = u.values().to_vec();
    fft3(&mut data, dims, false);
    let total = (dims[0] * dims[1] * dims[2]) as f64;
    let scale = 1.0 / (g.space_constant() * g.eta_measure() * total);
    let mut out = SpectralField::zeros(g);
    let modes: Vec<_> = out.modes().collect();
    for m in modes {
        let i = (wrap(m.k, dims[0]) * dims[1] + wrap(m.n[0], dims[1])) * dims[2] + wrap(m.n[1], dims[2]);
        out.coeffs_mut()[m.index] = data[i] * (scale * sign(m.n[0] + m.n[1]));
    }
    Ok(out)
}

/// Samples on the grid's own lattice.
pub fn to_physical(f: &SpectralField) -> PhysicalField {
    let g = f.grid();
    to_physical_dims(f, g.x_points(), g.y_points()).expect("natural dimensions always fit")
}

/// Direction selector for [`transform`].
#[derive(Debug, Clone)]
pub enum TransformInput {
    Spectral(SpectralField),
    Physical(PhysicalField),
}

/// Two-way transform between coefficients and samples.
pub fn transform(input: &TransformInput) -> Result<TransformInput> {
    match input {
        TransformInput::Spectral(f) => Ok(TransformInput::Physical(to_physical(f))),
        TransformInput::Physical(u) => Ok(TransformInput::Spectral(to_spectral(u)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grid::GridParams;
    use std::f64::consts::PI;

    fn grid(y_dims: usize) -> GridSpec {
        GridSpec::new(GridParams {
            k_max: 5,
            y_points: 16,
            y_length: 16.0,
            y_dims,
            t_points: 16,
            t_window: 2.5,
        })
        .unwrap()
    }

    fn pseudo_random(g: GridSpec) -> SpectralField {
        let mut f = SpectralField::zeros(g);
        for (i, c) in f.coeffs_mut().iter_mut().enumerate() {
            let a = (i as f64 * 0.7548776662).fract() - 0.5;
            let b = (i as f64 * 0.5698402910).fract() - 0.5;
            *c = Complex64::new(a, b);
        }
        f
    }

    #[test]
    fn round_trip_and_parseval() {
        for d in [1, 2] {
            let f = pseudo_random(grid(d));
            let u = to_physical(&f);
            let back = to_spectral(&u).unwrap();
            let err = back.sub(&f).unwrap().l2_norm() / f.l2_norm();
            assert!(err < 1e-13, "d = {d}: {err}");
            assert!((u.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
            let padded = to_physical_dims(&f, 17, 32).unwrap();
            assert!((padded.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
            let back = to_spectral(&padded).unwrap();
            assert!(back.sub(&f).unwrap().l2_norm() < 1e-13 * f.l2_norm());
        }
    }

    #[test]
    fn matches_direct_series() {
        let g = grid(1);
        let f = pseudo_random(g);
        let u = to_physical(&f);
        let (x, y) = lattice_coords(&g, natural_dims(&g));
        let c = g.space_constant() * g.eta_measure();
        for (jx, xv) in x.iter().enumerate().step_by(3) {
            for (jy, yv) in y.iter().enumerate().step_by(5) {
                let mut s = Complex64::new(0.0, 0.0);
                for (m, a) in f.support() {
                    let eta = f.eta(m.n)[0];
                    s += a * Complex64::from_polar(c, m.k as f64 * xv + eta * yv);
                }
                let got = u.values()[jx * g.y_points() + jy];
                assert!((got - s).norm() < 1e-13, "{got} vs {s}");
            }
        }
    }

    #[test]
    fn single_harmonic() {
        let g = grid(1);
        let u = PhysicalField::sample(g, |x, y| Complex64::new(x.cos() * (2.0 * PI * y[0] / 16.0).cos(), 0.0));
        let f = to_spectral(&u).unwrap();
        for (m, c) in f.support() {
            if c.norm() > 1e-12 {
                assert_eq!(m.k.abs(), 1);
                assert_eq!(m.n[0].abs(), 1);
            }
        }
    }

    #[test]
    fn shape_mismatch() {
        let g = grid(1);
        assert!(PhysicalField::new(g, [11, 16, 1], vec![Complex64::new(0.0, 0.0); 5]).is_err());
        let small = PhysicalField::new(g, [5, 16, 1], vec![Complex64::new(0.0, 0.0); 80]).unwrap();
        assert!(to_spectral(&small).is_err());
        assert!(to_physical_dims(&SpectralField::zeros(g), 11, 8).is_err());
    }
}
