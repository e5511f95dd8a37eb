use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Raw, unvalidated lattice parameters as they appear in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub k_max: usize,
    pub y_points: usize,
    pub y_length: f64,
    #[serde(default = "one")]
    pub y_dims: usize,
    #[serde(default = "default_t_points")]
    pub t_points: usize,
    #[serde(default = "default_t_window")]
    pub t_window: f64,
}

fn one() -> usize {
    1
}
fn default_t_points() -> usize {
    256
}
fn default_t_window() -> f64 {
    2.5
}

/// Validated discretization of `T x R^d x R_t`.
///
/// x-modes run over `-k_max..=k_max`, each y-axis carries `y_points` modes
/// `n in [-P/2, P/2)` with `eta = n * d_eta`, and space-time fields live on
/// the window `[-t_window, t_window)` sampled at `t_points` instants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    params: GridParams,
}

fn pow2_at_least_8(n: usize) -> bool {
    n >= 8 && n.is_power_of_two()
}

impl GridSpec {
    pub fn new(p: GridParams) -> Result<Self> {
        let mut v = Vec::new();
        if p.k_max < 1 {
            v.push(Violation::new("k_max", "must be >= 1"));
        }
        if !pow2_at_least_8(p.y_points) {
            v.push(Violation::new(
                "y_points",
                format!("must be a power of two >= 8, got {}", p.y_points),
            ));
        }
        if !(p.y_length.is_finite() && p.y_length > 0.0) {
            v.push(Violation::new("y_length", format!("must be positive, got {}", p.y_length)));
        }
        if !(p.y_dims == 1 || p.y_dims == 2) {
            v.push(Violation::new("y_dims", format!("must be 1 or 2, got {}", p.y_dims)));
        }
        if !pow2_at_least_8(p.t_points) {
            v.push(Violation::new(
                "t_points",
                format!("must be a power of two >= 8, got {}", p.t_points),
            ));
        }
        if !(p.t_window.is_finite() && p.t_window > 0.0) {
            v.push(Violation::new("t_window", format!("must be positive, got {}", p.t_window)));
        }
        if v.is_empty() {
            Ok(Self { params: p })
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    pub fn params(&self) -> GridParams {
        self.params
    }
    pub fn k_max(&self) -> usize {
        self.params.k_max
    }
    pub fn y_points(&self) -> usize {
        self.params.y_points
    }
    pub fn y_length(&self) -> f64 {
        self.params.y_length
    }
    pub fn y_dims(&self) -> usize {
        self.params.y_dims
    }
    pub fn t_points(&self) -> usize {
        self.params.t_points
    }
    pub fn t_window(&self) -> f64 {
        self.params.t_window
    }

    /// Number of x samples of an unpadded physical field.
    pub fn x_points(&self) -> usize {
        2 * self.params.k_max + 1
    }
    /// Modes along the second y-axis (1 when the transverse dimension is one).
    pub fn y_points2(&self) -> usize {
        if self.params.y_dims == 2 {
            self.params.y_points
        } else {
            1
        }
    }
    pub fn mode_count(&self) -> usize {
        self.x_points() * self.params.y_points * self.y_points2()
    }
    pub fn d_eta(&self) -> f64 {
        2.0 * PI / self.params.y_length
    }
    /// `d_eta^d`, the transverse frequency cell measure.
    pub fn eta_measure(&self) -> f64 {
        self.d_eta().powi(self.params.y_dims as i32)
    }
    pub fn d_y(&self) -> f64 {
        self.params.y_length / self.params.y_points as f64
    }
    pub fn d_t(&self) -> f64 {
        2.0 * self.params.t_window / self.params.t_points as f64
    }
    pub fn d_tau(&self) -> f64 {
        PI / self.params.t_window
    }
    /// Sample instants `-t_window + j d_t`.
    pub fn times(&self) -> Vec<f64> {
        let dt = self.d_t();
        (0..self.params.t_points)
            .map(|j| -self.params.t_window + j as f64 * dt)
            .collect()
    }
    /// Largest retained transverse mode index; `-P/2` is the unpaired Nyquist mode.
    pub fn n_max(&self) -> i64 {
        self.params.y_points as i64 / 2 - 1
    }
    /// `(2 pi)^{-(1 + d)/2}`, the unitary Fourier constant in the space variables.
    pub fn space_constant(&self) -> f64 {
        (2.0 * PI).powf(-(1.0 + self.params.y_dims as f64) / 2.0)
    }
}

/// Validated grid from raw parameters.
pub fn make_grid(p: GridParams) -> Result<GridSpec> {
    GridSpec::new(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn base() -> GridParams {
        GridParams {
            k_max: 32,
            y_points: 128,
            y_length: 64.0 * PI,
            y_dims: 1,
            t_points: 64,
            t_window: 4.0,
        }
    }

    #[test]
    fn valid_grid_spacing() {
        let g = make_grid(base()).unwrap();
        assert!((g.d_eta() - 1.0 / 32.0).abs() < 1e-15);
        assert!((g.d_tau() - PI / 4.0).abs() < 1e-15);
        assert!((g.d_t() * g.d_tau() - 2.0 * PI / 64.0).abs() < 1e-15);
        assert_eq!(g.x_points(), 65);
        assert_eq!(g.y_points2(), 1);
    }

    #[test]
    fn violations_are_listed() {
        let mut p = base();
        p.y_points = 100;
        match make_grid(p) {
            Err(Error::InvalidSpec(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].field, "y_points");
            }
            other => panic!("{other:?}"),
        }
        let mut p = base();
        p.y_dims = 3;
        p.t_points = 4;
        match make_grid(p) {
            Err(Error::InvalidSpec(v)) => {
                let names: Vec<_> = v.iter().map(|x| x.field.as_str()).collect();
                assert_eq!(names, ["y_dims", "t_points"]);
            }
            other => panic!("{other:?}"),
        }
    }
}
