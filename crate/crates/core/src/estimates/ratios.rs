//! Estimate ratios: bilinear Strichartz quotients and bilinear restriction-norm quotients.

use super::product::{field_signals, product_norm};
use crate::error::{Error, Result};
use crate::evolution::{free_signals, CutoffSpec, TimeProfile};
use crate::fields::norms::{bourgain_norm, Flavor};
use crate::fields::{NormSpec, SpaceTimeField, SpectralField};
use crate::symbols::DispersionParams;

fn quotient(num: f64, den: f64) -> Result<f64> {
    if den == 0.0 || !den.is_finite() {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

fn strichartz_ratio(
    u0: &SpectralField,
    v0: &SpectralField,
    s1: f64,
    s2: f64,
    cutoff: CutoffSpec,
    params: &DispersionParams,
) -> Result<f64> {
    u0.check_same_grid(v0)?;
    let den = u0.sobolev_norm(s1, 0.0) * v0.sobolev_norm(s2, 0.0);
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let grid = *u0.grid();
    let su = free_signals(u0, TimeProfile::Cutoff(cutoff), params)?;
    let sv = free_signals(v0, TimeProfile::Unit, params)?;
    let num = product_norm(&grid, params, &su, &sv, false, &NormSpec::x(0.0, 0.0, 0.0))?;
    quotient(num, den)
}

/// `|| psi (e^{it phase} u0)(e^{it phase} v0) ||_{L^2_{txy}} / (||u0||_{H^{s1}_x L^2_y} ||v0||_{H^{s2}_x L^2_y})`.
pub fn strichartz2d_ratio(
    u0: &SpectralField,
    v0: &SpectralField,
    s1: f64,
    s2: f64,
    cutoff: CutoffSpec,
    params: &DispersionParams,
) -> Result<f64> {
    if s1 < 0.0 || s2 < 0.0 {
        return Err(Error::InvalidSpec(vec![crate::Violation::new("s1, s2", "must be >= 0")]));
    }
    strichartz_ratio(u0, v0, s1, s2, cutoff, params)
}

/// The same quotient for two transverse dimensions. The estimate is global in
/// time; the widest cutoff that fits the window stands in for the whole line.
pub fn strichartz3d_ratio(
    u0: &SpectralField,
    v0: &SpectralField,
    s1: f64,
    s2: f64,
    params: &DispersionParams,
) -> Result<f64> {
    if u0.grid().y_dims() != 2 || params.y_dims() != 2 {
        return Err(Error::InvalidSpec(vec![crate::Violation::new(
            "y_dims",
            "the three-dimensional quotient needs two transverse dimensions",
        )]));
    }
    let wide = CutoffSpec::new(u0.grid().t_window() / 2.0)?;
    strichartz2d_ratio(u0, v0, s1, s2, wide, params)
}

/// `||d_x(u v)||_lhs / (||u||_rhs ||v||_rhs)`.
pub fn bilinear_ratio(
    u: &SpaceTimeField,
    v: &SpaceTimeField,
    lhs: &NormSpec,
    rhs: &NormSpec,
    params: &DispersionParams,
) -> Result<f64> {
    if !matches!(lhs.flavor, Flavor::X | Flavor::Xweighted | Flavor::Z) {
        return Err(Error::NormMismatch(format!("left norm cannot be {:?}", lhs.flavor)));
    }
    if !matches!(rhs.flavor, Flavor::X | Flavor::Xweighted) {
        return Err(Error::NormMismatch(format!("right norm cannot be {:?}", rhs.flavor)));
    }
    if u.grid() != v.grid() {
        return Err(Error::ShapeMismatch {
            expected: format!("{:?}", u.grid().params()),
            found: format!("{:?}", v.grid().params()),
        });
    }
    let den = bourgain_norm(u, rhs, params)? * bourgain_norm(v, rhs, params)?;
    if den == 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let num = product_norm(u.grid(), params, &field_signals(u)?, &field_signals(v)?, true, lhs)?;
    quotient(num, den)
}
