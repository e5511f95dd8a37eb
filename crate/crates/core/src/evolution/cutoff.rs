use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Smooth time cutoff `psi_T(t) = psi(t / T)`.
///
/// `psi` equals 1 on `[-1, 1]`, vanishes outside `(-2, 2)` and on the
/// transition layer is `g(2 - |t|) / (g(2 - |t|) + g(|t| - 1))` with
/// `g(x) = e^{-1/x}`, which is smooth to all orders at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub t_scale: f64,
}

#[inline]
fn g(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// The unscaled bump.
pub fn bump(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let (up, down) = (g(2.0 - a), g(a - 1.0));
        up / (up + down)
    }
}

impl CutoffSpec {
    pub fn new(t_scale: f64) -> Result<Self> {
        if !(t_scale.is_finite() && t_scale > 0.0) {
            return Err(Error::InvalidSpec(vec![Violation::new(
                "t_scale",
                format!("must be positive, got {t_scale}"),
            )]));
        }
        Ok(Self { t_scale })
    }

    pub fn eval(&self, t: f64) -> f64 {
        bump(t / self.t_scale)
    }

    /// Half-length of the support.
    pub fn support(&self) -> f64 {
        2.0 * self.t_scale
    }
}
