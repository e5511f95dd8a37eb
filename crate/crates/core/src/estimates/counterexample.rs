//! The two-wave interaction that defeats a global-in-time bilinear estimate.
//!
//! Both factors are the free evolution of `chi_I(eta)` at `k = N`. Their
//! product at `k = 2N` has space-time transform
//! `I(tau, eta) = (N/2) omega^{-1} chi(eta/2 + omega) chi(eta/2 - omega)`
//! with `omega^2 = N phi0(N) - N tau/2 - eta^2/4`. The square integral has a
//! logarithmic singularity at `omega = 0`, so `omega` is floored at
//! `floor * |I|`; with that regularization
//! `||I||^2 = 4 N |I| (ln(1/floor) - 1 + floor)`.

use serde::{Deserialize, Serialize};

use super::fit::{fit_exponent, RatioSample, SampleMeta, ScalingFit};
use crate::error::{Error, Result, Violation};
use crate::symbols::DispersionParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    pub n: u64,
    pub half_width: f64,
}

impl CounterexampleConfig {
    pub fn new(n: u64, half_width: f64) -> Result<Self> {
        let mut v = Vec::new();
        if n < 8 {
            v.push(Violation::new("n", format!("must be >= 8, got {n}")));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            v.push(Violation::new("half_width", format!("must be positive, got {half_width}")));
        }
        if v.is_empty() {
            Ok(Self { n, half_width })
        } else {
            Err(Error::InvalidSpec(v))
        }
    }
}

/// Quadrature resolution: Gauss-Legendre order, panels per axis and the
/// relative floor on `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub order: usize,
    pub panels: usize,
    pub floor: f64,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            order: 8,
            panels: 24,
            floor: 1e-6,
        }
    }
}

impl Quadrature {
    fn check(&self) -> Result<()> {
        let mut v = Vec::new();
        if self.order < 2 || self.order > 64 {
            v.push(Violation::new("order", "must lie in [2, 64]"));
        }
        if self.panels < 2 {
            v.push(Violation::new("panels", "must be >= 2"));
        }
        if !(self.floor > 0.0 && self.floor < 0.5) {
            v.push(Violation::new("floor", "must lie in (0, 1/2)"));
        }
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(v))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleValue {
    /// `||I||_{L^2_{tau eta}}` through the `(eta, omega)` variables.
    pub lhs: f64,
    /// The same norm integrated directly in `(tau, eta)`.
    pub lhs_direct: f64,
    /// Regularized closed form.
    pub lhs_exact: f64,
    pub warnings: Vec<String>,
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Panel edges on `[a, b]` refined geometrically toward `b` down to width `fine`.
fn graded_toward_end(a: f64, b: f64, fine: f64, panels: usize) -> Vec<f64> {
    let len = b - a;
    let fine = fine.min(len / panels as f64).max(len * 1e-15);
    let ratio = (len / fine).powf(1.0 / panels as f64);
    let mut edges: Vec<f64> = (0..=panels).map(|i| b - fine * ratio.powi(i as i32) + fine).collect();
    edges[0] = b;
    edges[panels] = a;
    edges.reverse();
    edges.dedup();
    edges
}

fn integrate(edges: &[f64], nodes: &(Vec<f64>, Vec<f64>), mut f: impl FnMut(f64) -> f64) -> f64 {
    let mut sum = 0.0;
    for w in edges.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (x, wt) in nodes.0.iter().zip(&nodes.1) {
            sum += half * wt * f(mid + half * x);
        }
    }
    sum
}

/// `|I(tau', eta)|^2` with `tau'` measured from the resonant frequency
/// `2 phi0(N)`; zero outside the support and below the `omega` floor.
pub fn counterexample_integrand(cfg: &CounterexampleConfig, tau_shifted: f64, eta: f64, floor: f64) -> f64 {
    let n = cfg.n as f64;
    let w2 = -n * tau_shifted / 2.0 - eta * eta / 4.0;
    if w2 <= 0.0 {
        return 0.0;
    }
    let w = w2.sqrt();
    let hw = cfg.half_width;
    if w < floor * hw || (eta / 2.0 + w).abs() > hw || (eta / 2.0 - w).abs() > hw {
        return 0.0;
    }
    n * n / (4.0 * w2)
}

/// Regularized `||I||_{L^2}` in closed form.
pub fn counterexample_exact(cfg: &CounterexampleConfig, floor: f64) -> f64 {
    (4.0 * cfg.n as f64 * cfg.half_width * (-floor.ln() - 1.0 + floor)).sqrt()
}

pub fn counterexample_lhs(
    cfg: &CounterexampleConfig,
    params: &DispersionParams,
    quad: &Quadrature,
) -> Result<CounterexampleValue> {
    quad.check()?;
    let n = cfg.n as f64;
    let hw = cfg.half_width;
    let eps = quad.floor;
    let gl = gauss_legendre(quad.order);
    let mut warnings = Vec::new();

    // Support in tau spans 2|I|^2/N next to a carrier of size 2 phi0(N).
    let tau_span = 2.0 * hw * hw / n;
    if tau_span <= 4.0 * f64::EPSILON * 2.0 * params.phi0(cfg.n as i64).abs() {
        warnings.push(format!(
            "support width {tau_span:e} in tau is below the resolution of the resonant frequency"
        ));
    }

    // Outer eta over [0, 2|I|(1 - floor)], doubled by symmetry.
    let eta_top = 2.0 * hw * (1.0 - eps);
    let eta_edges = graded_toward_end(0.0, eta_top, eps * hw, quad.panels);

    // Route 1: integrand N / omega on [floor |I|, |I| - eta/2].
    let lhs_sq = 2.0 * integrate(&eta_edges, &gl, |eta| {
        let top = hw - eta / 2.0;
        let bottom = eps * hw;
        if top <= bottom {
            return 0.0;
        }
        let edges = graded_toward_end(-top, -bottom, bottom, quad.panels);
        integrate(&edges, &gl, |m| n / (-m))
    });

    // Route 2: tau' between the support edge and the omega floor.
    let lhs_direct_sq = 2.0 * integrate(&eta_edges, &gl, |eta| {
        let top = hw - eta / 2.0;
        let bottom = eps * hw;
        if top <= bottom {
            return 0.0;
        }
        let tau_at = |w: f64| -2.0 * (w * w + eta * eta / 4.0) / n;
        let (lo, hi) = (tau_at(top), tau_at(bottom));
        let fine = tau_at(bottom) - tau_at(bottom * 2.0);
        let edges = graded_toward_end(lo, hi, fine, quad.panels);
        integrate(&edges, &gl, |t| {
            let w2 = -n * t / 2.0 - eta * eta / 4.0;
            if w2 <= 0.0 {
                0.0
            } else {
                n * n / (4.0 * w2)
            }
        })
    });

    let lhs = lhs_sq.sqrt();
    let lhs_direct = lhs_direct_sq.sqrt();
    let lhs_exact = counterexample_exact(cfg, eps);
    if !(lhs > 0.0) {
        warnings.push("quadrature found an empty support".into());
    }
    let gap = (lhs - lhs_direct).abs() / lhs.max(f64::MIN_POSITIVE);
    if gap > 1e-6 {
        warnings.push(format!("quadrature routes differ by {gap:.2e} relative"));
    }
    Ok(CounterexampleValue {
        lhs,
        lhs_direct,
        lhs_exact,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EstimateFails,
    NoFailureDetected,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub fit: ScalingFit,
    pub predicted: f64,
    pub verdict: Verdict,
    pub values: Vec<CounterexampleValue>,
}

/// Growth of `lhs / (||D^s u0|| ||u0||)` over `ns` with `|I| = c N^a`.
pub fn counterexample_verdict(
    ns: &[u64],
    width_coeff: f64,
    width_exponent: f64,
    s: f64,
    params: &DispersionParams,
    quad: &Quadrature,
) -> Result<CounterexampleReport> {
    let mut cfgs = Vec::new();
    let mut values = Vec::new();
    for &n in ns {
        let cfg = CounterexampleConfig::new(n, width_coeff * (n as f64).powf(width_exponent))?;
        values.push(counterexample_lhs(&cfg, params, quad)?);
        cfgs.push(cfg);
    }
    counterexample_report(&cfgs, values, width_exponent, s, params)
}

/// Fit and verdict from values already computed for `cfgs`, in the same order.
pub fn counterexample_report(
    cfgs: &[CounterexampleConfig],
    values: Vec<CounterexampleValue>,
    width_exponent: f64,
    s: f64,
    params: &DispersionParams,
) -> Result<CounterexampleReport> {
    if cfgs.len() != values.len() {
        return Err(Error::ShapeMismatch {
            expected: format!("{} values", cfgs.len()),
            found: values.len().to_string(),
        });
    }
    let mut samples = Vec::new();
    for (cfg, v) in cfgs.iter().zip(&values) {
        // u0 = chi_I at k = N: ||u0||^2 = 2|I|, ||D^s u0|| = N^s ||u0||.
        let den = (cfg.n as f64).powf(s) * 2.0 * cfg.half_width;
        samples.push(RatioSample {
            n: cfg.n,
            value: v.lhs / den,
            meta: SampleMeta {
                s1: s,
                alpha: params.alpha(),
                kind: "counterexample".into(),
                ..SampleMeta::default()
            },
        });
    }
    let fit = fit_exponent(&samples)?;
    let verdict = if fit.exponent > 0.1 {
        Verdict::EstimateFails
    } else {
        Verdict::NoFailureDetected
    };
    Ok(CounterexampleReport {
        fit,
        predicted: 0.5 - s - width_exponent / 2.0,
        verdict,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m14: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((m14 - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn integrand_respects_support() {
        let cfg = CounterexampleConfig::new(16, 1.0).unwrap();
        let n = 16.0;
        for &(eta, w) in &[(0.5, 0.8), (1.9, 0.1), (-1.0, 0.6), (0.0, 1.01)] {
            let tau = -2.0 * (w * w + eta * eta / 4.0) / n;
            let value = counterexample_integrand(&cfg, tau, eta, 1e-6);
            let inside = (eta / 2.0 + w).abs() <= 1.0 && (eta / 2.0 - w).abs() <= 1.0;
            assert_eq!(value > 0.0, inside, "eta {eta}, omega {w}");
        }
        assert_eq!(counterexample_integrand(&cfg, 0.1, 0.0, 1e-6), 0.0);
    }

    #[test]
    fn invalid_config() {
        assert!(CounterexampleConfig::new(4, 1.0).is_err());
        assert!(CounterexampleConfig::new(16, 0.0).is_err());
    }
}
