//! Phase and resonance quantities of the dispersion relation.
//!
//! `phi0(k) = |k|^alpha k` is the one-dimensional symbol and
//! `phase(k, eta) = phi0(k) - |eta|^2 / k` the full one. Everything else here
//! (resonance function, modulation identity, the small denominators of the
//! third-order expansion) is built from these two.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Violation};

/// Dispersion exponent and transverse dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionParams {
    alpha: f64,
    y_dims: usize,
}

impl DispersionParams {
    pub fn new(alpha: f64, y_dims: usize) -> Result<Self> {
        let mut v = Vec::new();
        if !(alpha.is_finite() && alpha >= 2.0) {
            v.push(Violation::new("alpha", format!("must be finite and >= 2, got {alpha}")));
        }
        if !(y_dims == 1 || y_dims == 2) {
            v.push(Violation::new("y_dims", format!("must be 1 or 2, got {y_dims}")));
        }
        if v.is_empty() {
            Ok(Self { alpha, y_dims })
        } else {
            Err(Error::InvalidSpec(v))
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn y_dims(&self) -> usize {
        self.y_dims
    }

    /// `|k|^alpha k`; zero at `k = 0`.
    pub fn phi0(&self, k: i64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        let m = k.unsigned_abs() as f64;
        let p = m.powf(self.alpha) * m;
        if k < 0 {
            -p
        } else {
            p
        }
    }

    /// `phi0(k) - |eta|^2 / k` for raw coordinates. Callers guarantee `k != 0`.
    #[inline]
    pub fn phase_raw(&self, k: i64, eta_sq: f64) -> f64 {
        self.phi0(k) - eta_sq / k as f64
    }

    /// Full phase at a frequency point.
    pub fn phase(&self, p: &FrequencyPoint) -> Result<f64> {
        if p.k == 0 {
            return Err(Error::DegenerateFrequency("phase is undefined at k = 0".into()));
        }
        Ok(self.phase_raw(p.k, p.eta_sq()))
    }
}

/// Free function form of [`DispersionParams::phi0`].
pub fn phi0(params: &DispersionParams, k: i64) -> f64 {
    params.phi0(k)
}

/// Free function form of [`DispersionParams::phase`].
pub fn phase(params: &DispersionParams, p: &FrequencyPoint) -> Result<f64> {
    params.phase(p)
}

/// Spatial frequency `(k, eta)`. The second transverse component is zero
/// when the transverse dimension is one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyPoint {
    pub k: i64,
    pub eta: [f64; 2],
}

impl FrequencyPoint {
    pub fn new(k: i64, eta: f64) -> Self {
        Self { k, eta: [eta, 0.0] }
    }

    pub fn new2(k: i64, eta: [f64; 2]) -> Self {
        Self { k, eta }
    }

    pub fn eta_sq(&self) -> f64 {
        self.eta[0] * self.eta[0] + self.eta[1] * self.eta[1]
    }
}

impl std::ops::Sub for FrequencyPoint {
    type Output = FrequencyPoint;
    fn sub(self, o: Self) -> Self {
        Self {
            k: self.k - o.k,
            eta: [self.eta[0] - o.eta[0], self.eta[1] - o.eta[1]],
        }
    }
}

impl std::ops::Add for FrequencyPoint {
    type Output = FrequencyPoint;
    fn add(self, o: Self) -> Self {
        Self {
            k: self.k + o.k,
            eta: [self.eta[0] + o.eta[0], self.eta[1] + o.eta[1]],
        }
    }
}

/// Space-time frequency with its modulation `sigma = tau - phase(point)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModulationPoint {
    pub tau: f64,
    pub point: FrequencyPoint,
    pub sigma: f64,
}

impl ModulationPoint {
    pub fn new(params: &DispersionParams, tau: f64, point: FrequencyPoint) -> Result<Self> {
        let sigma = tau - params.phase(&point)?;
        Ok(Self { tau, point, sigma })
    }
}

/// `phi0(k) - phi0(k1) - phi0(k - k1)`.
pub fn resonance_r(params: &DispersionParams, k: i64, k1: i64) -> Result<f64> {
    if k1 == 0 || k == k1 {
        return Err(Error::DegenerateFrequency(format!(
            "resonance needs k1 != 0 and k != k1, got k = {k}, k1 = {k1}"
        )));
    }
    Ok(params.phi0(k) - params.phi0(k1) - params.phi0(k - k1))
}

fn min_max_abs(ks: [i64; 3]) -> (i64, i64) {
    let a = ks.map(|k| k.abs());
    (*a.iter().min().unwrap(), *a.iter().max().unwrap())
}

/// Constants of the two-sided resonance bound `c_lo |kmin||kmax|^a <= |r| <= c_hi |kmin||kmax|^a`.
pub fn resonance_bound_constants(params: &DispersionParams) -> (f64, f64) {
    let a = params.alpha;
    (a / 2f64.powf(a), a + 1.0 + 2f64.powf(-a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundViolation {
    pub k: i64,
    pub k1: i64,
    pub r: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub alpha: f64,
    pub k_max: i64,
    pub pairs_checked: u64,
    pub violations: Vec<BoundViolation>,
    /// Smallest observed `|r| / (|kmin||kmax|^alpha)`.
    pub min_ratio: f64,
    /// Largest observed `|r| / (|kmin||kmax|^alpha)`.
    pub max_ratio: f64,
}

/// Checks the two-sided resonance bound on every pair `1 <= |k|, |k1| <= k_max`, `k != k1`.
pub fn resonance_bounds_audit(params: &DispersionParams, k_max: i64) -> Result<AuditReport> {
    if k_max < 2 {
        return Err(Error::InvalidSpec(vec![Violation::new("k_max", "must be >= 2")]));
    }
    let (c_lo, c_hi) = resonance_bound_constants(params);
    let mut report = AuditReport {
        alpha: params.alpha,
        k_max,
        pairs_checked: 0,
        violations: Vec::new(),
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
    };
    for k in -k_max..=k_max {
        if k == 0 {
            continue;
        }
        for k1 in -k_max..=k_max {
            if k1 == 0 || k1 == k {
                continue;
            }
            let r = resonance_r(params, k, k1)?;
            let (lo, hi) = min_max_abs([k, k1, k - k1]);
            let scale = lo as f64 * (hi as f64).powf(params.alpha);
            let ratio = r.abs() / scale;
            report.pairs_checked += 1;
            report.min_ratio = report.min_ratio.min(ratio);
            report.max_ratio = report.max_ratio.max(ratio);
            let (lower, upper) = (c_lo * scale, c_hi * scale);
            if r.abs() < lower || r.abs() > upper {
                report.violations.push(BoundViolation { k, k1, r, lower, upper });
            }
        }
    }
    Ok(report)
}

/// Decomposition of `sigma1 + sigma2 - sigma` into resonance and transverse parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResonanceRecord {
    pub r: f64,
    pub transverse: f64,
    pub lhs: f64,
    pub kmin: i64,
    pub kmax: i64,
    /// `max(|sigma|, |sigma1|, |sigma2|)`.
    pub max_modulation: f64,
}

impl ResonanceRecord {
    /// `|lhs - (r + transverse)| / (1 + |lhs|)`.
    pub fn identity_residual(&self) -> f64 {
        (self.lhs - (self.r + self.transverse)).abs() / (1.0 + self.lhs.abs())
    }

    /// The modulation lower bound `alpha / (3 2^alpha) |kmin||kmax|^alpha`.
    pub fn modulation_floor(&self, params: &DispersionParams) -> f64 {
        let a = params.alpha;
        a / (3.0 * 2f64.powf(a)) * self.kmin as f64 * (self.kmax as f64).powf(a)
    }

    pub fn floor_holds(&self, params: &DispersionParams) -> bool {
        self.max_modulation >= self.modulation_floor(params) * (1.0 - 1e-12)
    }

    /// False only when both parts are nonzero and of opposite sign.
    pub fn signs_agree(&self) -> bool {
        self.r == 0.0 || self.transverse == 0.0 || (self.r > 0.0) == (self.transverse > 0.0)
    }
}

/// Evaluates both sides of the modulation identity for the interaction
/// `(tau1, xi1) + (tau - tau1, xi - xi1) -> (tau, xi)`.
pub fn resonance_identity(
    params: &DispersionParams,
    m: &ModulationPoint,
    m1: &ModulationPoint,
) -> Result<ResonanceRecord> {
    let (p, p1) = (m.point, m1.point);
    let p2 = p - p1;
    if p.k == 0 || p1.k == 0 || p2.k == 0 {
        return Err(Error::DegenerateFrequency(format!(
            "k = {}, k1 = {}, k2 = {} must all be nonzero",
            p.k, p1.k, p2.k
        )));
    }
    let sigma = m.tau - params.phase(&p)?;
    let sigma1 = m1.tau - params.phase(&p1)?;
    let sigma2 = (m.tau - m1.tau) - params.phase(&p2)?;
    let r = resonance_r(params, p.k, p1.k)?;
    let cross = [
        p.k as f64 * p1.eta[0] - p1.k as f64 * p.eta[0],
        p.k as f64 * p1.eta[1] - p1.k as f64 * p.eta[1],
    ];
    let transverse =
        (cross[0] * cross[0] + cross[1] * cross[1]) / (p.k as f64 * p1.k as f64 * p2.k as f64);
    let (kmin, kmax) = min_max_abs([p.k, p1.k, p2.k]);
    Ok(ResonanceRecord {
        r,
        transverse,
        lhs: sigma1 + sigma2 - sigma,
        kmin,
        kmax,
        max_modulation: sigma.abs().max(sigma1.abs()).max(sigma2.abs()),
    })
}

/// `phase(xi1) + phase(xi2) - phase(xi1 + xi2)` on the set `k1, k2, k1 + k2 != 0`.
pub fn denom_a(params: &DispersionParams, x1: &FrequencyPoint, x2: &FrequencyPoint) -> Result<f64> {
    let s = *x1 + *x2;
    if x1.k == 0 || x2.k == 0 || s.k == 0 {
        return Err(Error::Inadmissible(format!(
            "need k1, k2, k1 + k2 nonzero, got ({}, {})",
            x1.k, x2.k
        )));
    }
    Ok(params.phase(x1)? + params.phase(x2)? - params.phase(&s)?)
}

fn check_triple(x1: &FrequencyPoint, x2: &FrequencyPoint, x3: &FrequencyPoint) -> Result<()> {
    let (k1, k2, k3) = (x1.k, x2.k, x3.k);
    if k1 == 0 || k2 == 0 || k3 == 0 || k1 + k2 == 0 || k1 + k2 + k3 == 0 {
        return Err(Error::Inadmissible(format!(
            "need k_j, k1 + k2, k1 + k2 + k3 nonzero, got ({k1}, {k2}, {k3})"
        )));
    }
    Ok(())
}

/// `phase(xi3) + phase(xi1 + xi2) - phase(xi1 + xi2 + xi3)`.
pub fn denom_b(
    params: &DispersionParams,
    x1: &FrequencyPoint,
    x2: &FrequencyPoint,
    x3: &FrequencyPoint,
) -> Result<f64> {
    check_triple(x1, x2, x3)?;
    let s12 = *x1 + *x2;
    Ok(params.phase(x3)? + params.phase(&s12)? - params.phase(&(s12 + *x3))?)
}

/// `A + B = phase(xi1) + phase(xi2) + phase(xi3) - phase(xi1 + xi2 + xi3)`,
/// summed with the `phi0` parts and the transverse parts kept apart so that
/// the large `phi0` terms cancel exactly when they should.
pub fn denom_a_plus_b(
    params: &DispersionParams,
    x1: &FrequencyPoint,
    x2: &FrequencyPoint,
    x3: &FrequencyPoint,
) -> Result<f64> {
    check_triple(x1, x2, x3)?;
    let s = *x1 + *x2 + *x3;
    let dispersive = params.phi0(x1.k) + params.phi0(x2.k) + params.phi0(x3.k) - params.phi0(s.k);
    let transverse = -x1.eta_sq() / x1.k as f64 - x2.eta_sq() / x2.k as f64
        - x3.eta_sq() / x3.k as f64
        + s.eta_sq() / s.k as f64;
    Ok(dispersive + transverse)
}

/// `(e^z - 1) / z`, with a short Taylor series near the origin.
pub fn phi1(z: Complex64) -> Complex64 {
    if z.norm() >= 1e-4 {
        return (z.exp() - 1.0) / z;
    }
    // 1 + z/2! + z^2/3! + ... through z^7/8!
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 2..=8 {
        term = term * z / n as f64;
        sum += term;
    }
    sum
}

/// `[phi_0, phi_1, phi_2, phi_3](z)` with `phi_0 = e^z` and
/// `phi_{j+1}(z) = (phi_j(z) - 1/j!) / z`.
pub fn phi_functions(z: Complex64) -> [Complex64; 4] {
    if z.norm() < 0.5 {
        // phi_j(z) = sum_n z^n / (n + j)!
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (j, o) in out.iter_mut().enumerate() {
            let mut fact = (1..=j).map(|x| x as f64).product::<f64>();
            let mut pow = Complex64::new(1.0, 0.0);
            let mut n = 0usize;
            loop {
                let term = pow / fact;
                *o += term;
                if term.norm() < 1e-18 || n > 40 {
                    break;
                }
                n += 1;
                pow *= z;
                fact *= (n + j) as f64;
            }
        }
        return out;
    }
    let e = z.exp();
    let p1 = (e - 1.0) / z;
    let p2 = (p1 - 1.0) / z;
    let p3 = (p2 - 0.5) / z;
    [e, p1, p2, p3]
}
