#![allow(dead_code)]

use std::f64::consts::PI;

use kplab::fields::{GridParams, GridSpec, SpectralField};
use kplab::DispersionParams;
use num_complex::Complex64;

pub fn grid(k_max: usize, y_points: usize, y_length: f64, y_dims: usize) -> GridSpec {
    GridSpec::new(GridParams {
        k_max,
        y_points,
        y_length,
        y_dims,
        t_points: 256,
        t_window: 2.5,
    })
    .unwrap()
}

pub fn params(alpha: f64, y_dims: usize) -> DispersionParams {
    DispersionParams::new(alpha, y_dims).unwrap()
}

/// Real field with `|k| = k0` and a Gaussian transverse profile of width `w`,
/// scaled so that the sup norm in physical space is about `amp`.
pub fn gaussian_mode(g: GridSpec, k0: i64, w: f64, amp: f64) -> SpectralField {
    let mut f = SpectralField::zeros(g);
    // u = amp cos(k0 x) e^{-y^2 w^2 / 2} has coefficients amp/2 sqrt(2 pi)/w e^{-eta^2/(2 w^2)}.
    let half = g.y_points() as i64 / 2;
    for n in -(half - 1)..half {
        let eta = n as f64 * g.d_eta();
        let c = amp / 2.0 * (2.0 * PI).sqrt() / w * (-eta * eta / (2.0 * w * w)).exp();
        for k in [k0, -k0] {
            f.set(k, [n, 0], Complex64::new(c, 0.0)).unwrap();
        }
    }
    f
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
