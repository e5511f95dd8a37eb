use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters that produced a ratio, enough to recompute it in isolation.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SampleMeta {
    pub s1: f64,
    pub s2: f64,
    pub b: f64,
    pub b_prime: f64,
    pub beta: f64,
    pub alpha: f64,
    pub seed: u64,
    pub kind: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    pub n: u64,
    pub value: f64,
    pub meta: SampleMeta,
}

impl RatioSample {
    pub fn new(n: u64, value: f64) -> Self {
        Self {
            n,
            value,
            meta: SampleMeta::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub samples: Vec<RatioSample>,
    pub exponent: f64,
    pub intercept: f64,
    /// RMS of the log-residuals.
    pub residual: f64,
}

/// Ordinary least squares slope and intercept of `y` on `x`, plus RMS residual.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, intercept, rms)
}

/// Log-log slope through any two or more points, without span requirements.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    least_squares(&x, &y).0
}

/// Fits `log value = exponent log N + c`. Needs three samples, a factor 8 in
/// `N` and strictly positive values.
pub fn fit_exponent(samples: &[RatioSample]) -> Result<ScalingFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSpan(format!(
            "{} samples, at least 3 needed",
            samples.len()
        )));
    }
    let lo = samples.iter().map(|s| s.n).min().unwrap();
    let hi = samples.iter().map(|s| s.n).max().unwrap();
    if lo == 0 || hi < 8 * lo {
        return Err(Error::InsufficientSpan(format!("N spans [{lo}, {hi}], a factor 8 is needed")));
    }
    for s in samples {
        if !(s.value > 0.0 && s.value.is_finite()) {
            return Err(Error::NonPositive { n: s.n, value: s.value });
        }
    }
    let x: Vec<f64> = samples.iter().map(|s| (s.n as f64).ln()).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.value.ln()).collect();
    let (exponent, intercept, residual) = least_squares(&x, &y);
    Ok(ScalingFit {
        samples: samples.to_vec(),
        exponent,
        intercept,
        residual,
    })
}

/// Largest sample at each `N`, ordered by `N`; ties keep the first occurrence.
pub fn worst_case_per_n(samples: &[RatioSample]) -> Vec<RatioSample> {
    let mut out: Vec<RatioSample> = Vec::new();
    let mut sorted: Vec<&RatioSample> = samples.iter().collect();
    sorted.sort_by_key(|s| s.n);
    for s in sorted {
        match out.last_mut() {
            Some(last) if last.n == s.n => {
                if s.value > last.value {
                    *last = s.clone();
                }
            }
            _ => out.push(s.clone()),
        }
    }
    out
}
