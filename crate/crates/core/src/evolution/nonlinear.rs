use num_complex::Complex64;

use crate::fields::transform::{to_physical_dims, to_spectral};
use crate::fields::SpectralField;

/// Physical lattice sizes that make a quadratic product alias-free when the
/// retained modes fill a fraction `dealias` of the padded lattice.
pub fn padded_dims(f: &SpectralField, dealias: f64) -> (usize, usize) {
    let g = f.grid();
    let nx = (g.x_points() as f64 / dealias - 1e-9).ceil() as usize;
    let ny = (g.y_points() as f64 / dealias - 1e-9).ceil() as usize;
    (nx.max(g.x_points()), ny.max(g.y_points()))
}

/// Coefficients of the product `u v`, truncated to the lattice.
pub fn product(u: &SpectralField, v: &SpectralField, dealias: f64) -> SpectralField {
    let (nx, ny) = padded_dims(u, dealias);
    let pu = to_physical_dims(u, nx, ny).expect("padded dims exceed the grid");
    let mut pv = if std::ptr::eq(u, v) {
        pu.clone()
    } else {
        to_physical_dims(v, nx, ny).expect("padded dims exceed the grid")
    };
    for (a, b) in pv.values_mut().iter_mut().zip(pu.values()) {
        *a *= b;
    }
    to_spectral(&pv).expect("padded dims exceed the grid")
}

/// `-(1/2) d_x (u^2)` with a padded product, projected to mean zero and with
/// the unpaired transverse mode removed.
pub fn nonlinearity(f: &SpectralField, dealias: f64) -> SpectralField {
    let mut sq = product(f, f, dealias);
    let modes: Vec<_> = sq.modes().collect();
    let c = sq.coeffs_mut();
    for m in modes {
        c[m.index] *= Complex64::new(0.0, -0.5 * m.k as f64);
    }
    sq.drop_nyquist();
    sq
}
