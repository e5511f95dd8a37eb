//! One driver per subcommand. Each returns the CSV rows, a JSON summary and,
//! where the experiment has one, the observed verdict.

use std::f64::consts::PI;

use kplab::estimates::{
    adversarial_pair, bilinear_ratio, counterexample_lhs, counterexample_report, fit_exponent,
    strichartz2d_ratio, strichartz3d_ratio, worst_case_per_n, PairKind, PairShape, RatioSample,
    ScalingFit, Verdict,
};
use kplab::evolution::{evolve_nonlinear, free_block, free_evolve, picard_solve, CutoffSpec, PicardOptions, SolveConfig};
use kplab::fields::{random_field, BandSpec, GridSpec};
use kplab::illposed::{illposed_report, third_derivative_norm, SmoothnessVerdict};
use kplab::symbols::{resonance_bounds_audit, resonance_identity};
use kplab::{DispersionParams, FrequencyPoint, ModulationPoint, SpectralField};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Expectation, InitialKind, Subcommand};
use crate::error::{CliError, Result};
use crate::sweep::sweep_parallel;

/// Exponent above which a fitted growth counts as failure of an estimate.
pub const GROWTH_THRESHOLD: f64 = 0.1;

pub struct Outcome {
    pub csv: String,
    pub summary: Value,
    pub verdict: Option<Expectation>,
    /// Named states to write under `fields/`.
    pub checkpoints: Vec<(String, SpectralField)>,
}

pub fn execute(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome> {
    match cfg.subcommand {
        Subcommand::Evolve => evolve(cfg),
        Subcommand::Picard => picard(cfg),
        Subcommand::Strichartz2d | Subcommand::Strichartz3d | Subcommand::BilinearRatio => {
            pair_sweep(cfg, workers)
        }
        Subcommand::Counterexample => counterexample(cfg, workers),
        Subcommand::IllposedScaling => illposed(cfg, workers),
        Subcommand::ResonanceAudit => audit(cfg, workers),
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn par<P: Sync, R: Send>(
    points: &[P],
    workers: usize,
    f: impl Fn(&P) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    sweep_parallel(points, workers, f).map_err(|e| CliError::Sweep {
        index: e.index,
        source: Box::new(e.source),
    })
}

fn fit_json(fit: &ScalingFit) -> Value {
    json!({
        "exponent": fit.exponent,
        "intercept": fit.intercept,
        "residual": fit.residual,
        "points": fit.samples.iter().map(|s| [s.n as f64, s.value]).collect::<Vec<_>>(),
    })
}

fn growth_verdict(exponent: f64) -> Expectation {
    if exponent > GROWTH_THRESHOLD {
        Expectation::Fails
    } else {
        Expectation::Bounded
    }
}

/// Initial data of the evolve and picard runs.
pub fn initial_field(cfg: &ExperimentConfig) -> Result<SpectralField> {
    let grid = GridSpec::new(cfg.grid.expect("resolved configuration has a grid"))?;
    let d = &cfg.initial;
    match d.kind {
        InitialKind::Gaussian => {
            // a cos(k0 x) e^{-y^2 w^2/2} has coefficients a/2 sqrt(2 pi)/w e^{-eta^2/(2 w^2)}.
            let mut f = SpectralField::zeros(grid);
            let half = grid.y_points() as i64 / 2;
            let w = d.width;
            for n in -(half - 1)..half {
                let eta = n as f64 * grid.d_eta();
                let c = d.amplitude / 2.0 * (2.0 * PI).sqrt() / w * (-eta * eta / (2.0 * w * w)).exp();
                for k in [d.k0, -d.k0] {
                    f.set(k, [n, 0], Complex64::new(c, 0.0))?;
                }
            }
            Ok(f)
        }
        InitialKind::Random => {
            let band = BandSpec {
                k_lo: d.k0,
                k_hi: d.k1,
                eta_max: d.width,
                amplitude: d.amplitude,
            };
            Ok(random_field(grid, &band, cfg.sweep.seeds[0])?)
        }
    }
}

#[derive(Serialize)]
struct EvolveRow {
    time: f64,
    l2: f64,
    relative_drift: f64,
}

fn evolve(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = cfg.params()?;
    let f = initial_field(cfg)?;
    let traj = evolve_nonlinear(&f, &cfg.evolve.solve_config(), &params)?;
    let l0 = traj.l2[0];
    let rows: Vec<EvolveRow> = traj
        .times
        .iter()
        .zip(&traj.l2)
        .map(|(&time, &l2)| EvolveRow {
            time,
            l2,
            relative_drift: if l0 > 0.0 { (l2 / l0 - 1.0).abs() } else { 0.0 },
        })
        .collect();
    let summary = json!({
        "initial_l2": l0,
        "final_l2": traj.l2.last(),
        "max_relative_drift": traj.max_relative_drift(),
        "steps": cfg.evolve.solve_config().steps().0,
    });
    let checkpoints = if cfg.evolve.checkpoint {
        vec![("initial".to_string(), f), ("final".to_string(), traj.last().clone())]
    } else {
        Vec::new()
    };
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: None,
        checkpoints,
    })
}

#[derive(Serialize)]
struct PicardRow {
    iteration: usize,
    difference: f64,
    contraction: Option<f64>,
}

fn picard(cfg: &ExperimentConfig) -> Result<Outcome> {
    let params = cfg.params()?;
    let p = &cfg.picard;
    let f = initial_field(cfg)?;
    let opts = PicardOptions {
        t_steps: p.t_steps,
        dealias: cfg.evolve.dealias,
    };
    let r = picard_solve(&f, CutoffSpec::new(p.t)?, p.iterations, &params, &opts)?;
    let solve = SolveConfig {
        dealias: cfg.evolve.dealias,
        ..SolveConfig::new(p.t / p.t_steps as f64, p.t)
    };
    let reference = evolve_nonlinear(&f, &solve, &params)?;
    let last = r.iterate.last().expect("picard keeps the final time");
    let gap = last.sub(reference.last())?.l2_norm();
    let duhamel = reference.last().sub(&free_evolve(&f, p.t, &params))?.l2_norm();
    let rows: Vec<PicardRow> = r
        .diffs
        .iter()
        .enumerate()
        .map(|(i, &d)| PicardRow {
            iteration: i + 1,
            difference: d,
            contraction: (i > 0 && r.diffs[i - 1] > 0.0).then(|| d / r.diffs[i - 1]),
        })
        .collect();
    // Differences at round-off level no longer carry the contraction.
    let floor = 1e-13 * f.l2_norm();
    let ratios: Vec<f64> = rows
        .iter()
        .skip(1)
        .filter(|r| r.difference > floor)
        .filter_map(|r| r.contraction)
        .collect();
    let worst = ratios.iter().cloned().fold(0.0, f64::max);
    let summary = json!({
        "l2_gap_to_integrator": gap,
        "nonlinear_part": duhamel,
        "worst_contraction": worst,
        "geometric": ratios.iter().all(|&q| q < 1.0),
        "differences": r.diffs,
    });
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: None,
        checkpoints: Vec::new(),
    })
}

#[derive(Serialize)]
struct PairRow {
    n: u64,
    kind: &'static str,
    seed: u64,
    value: f64,
    alpha: f64,
    s1: f64,
    s2: f64,
    b: Option<f64>,
    b_prime: Option<f64>,
    beta: Option<f64>,
}

/// One sweep point: data for `(n, kind, seed)` and the ratio under test.
pub fn pair_ratio(cfg: &ExperimentConfig, params: &DispersionParams, n: u64, kind: PairKind, seed: u64) -> Result<f64> {
    let s = &cfg.sweep;
    let grid = s.pair_grid(n, cfg.y_dims(), kind)?;
    let shape = PairShape {
        eta_max: s.random_eta_max,
        knapp_coeff: s.knapp_coeff,
    };
    let (u0, v0) = adversarial_pair(kind, n as i64, grid, seed, &shape)?;
    let (s1, s2) = (cfg.norms.s1.unwrap_or(0.0), cfg.norms.s2.unwrap_or(0.0));
    let r = match cfg.subcommand {
        Subcommand::Strichartz2d => strichartz2d_ratio(&u0, &v0, s1, s2, CutoffSpec::new(s.cutoff)?, params)?,
        Subcommand::Strichartz3d => strichartz3d_ratio(&u0, &v0, s1, s2, params)?,
        _ => {
            let c = Some(CutoffSpec::new(s.cutoff)?);
            let (lhs, rhs) = (cfg.norms.lhs.expect("resolved"), cfg.norms.rhs.expect("resolved"));
            bilinear_ratio(&free_block(&u0, c, params)?, &free_block(&v0, c, params)?, &lhs, &rhs, params)?
        }
    };
    Ok(r)
}

fn pair_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome> {
    let params = cfg.params()?;
    let s = &cfg.sweep;
    // Knapp data do not depend on the seed.
    let mut points = Vec::new();
    for &n in &s.n {
        for &kind in &s.kinds {
            let seeds = if kind == PairKind::Knapp { &s.seeds[..1] } else { &s.seeds[..] };
            points.extend(seeds.iter().map(|&seed| (n, kind, seed)));
        }
    }
    let values = par(&points, workers, |&(n, kind, seed)| pair_ratio(cfg, &params, n, kind, seed))?;

    let bilinear = cfg.subcommand == Subcommand::BilinearRatio;
    let (lhs, rhs) = (cfg.norms.lhs, cfg.norms.rhs);
    let rows: Vec<PairRow> = points
        .iter()
        .zip(&values)
        .map(|(&(n, kind, seed), &value)| PairRow {
            n,
            kind: kind.name(),
            seed,
            value,
            alpha: params.alpha(),
            s1: cfg.norms.s1.unwrap_or(0.0),
            s2: cfg.norms.s2.unwrap_or(0.0),
            b: rhs.filter(|_| bilinear).map(|r| r.b),
            b_prime: lhs.filter(|_| bilinear).map(|l| l.b),
            beta: rhs.filter(|_| bilinear).map(|r| r.beta),
        })
        .collect();

    let samples: Vec<RatioSample> = points
        .iter()
        .zip(&values)
        .map(|(&(n, kind, seed), &value)| {
            let mut r = RatioSample::new(n, value);
            r.meta.kind = kind.name().into();
            r.meta.seed = seed;
            r
        })
        .collect();
    let fit = fit_exponent(&worst_case_per_n(&samples))?;
    let mut per_kind = serde_json::Map::new();
    for &kind in &s.kinds {
        let own: Vec<RatioSample> = samples.iter().filter(|x| x.meta.kind == kind.name()).cloned().collect();
        if let Ok(f) = fit_exponent(&worst_case_per_n(&own)) {
            per_kind.insert(kind.name().into(), json!(f.exponent));
        }
    }
    let verdict = growth_verdict(fit.exponent);
    let summary = json!({
        "fit": fit_json(&fit),
        "per_kind_exponent": per_kind,
        "threshold": GROWTH_THRESHOLD,
        "verdict": verdict.name(),
    });
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: Some(verdict),
        checkpoints: Vec::new(),
    })
}

#[derive(Serialize)]
struct CounterexampleRow {
    n: u64,
    half_width: f64,
    lhs: f64,
    lhs_direct: f64,
    lhs_exact: f64,
    ratio: f64,
}

fn counterexample(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome> {
    let params = cfg.params()?;
    let c = &cfg.counterexample;
    let cfgs = cfg.sweep.n.iter().map(|&n| c.point(n)).collect::<kplab::Result<Vec<_>>>()?;
    let values = par(&cfgs, workers, |p| Ok(counterexample_lhs(p, &params, &c.quadrature)?))?;
    let report = counterexample_report(&cfgs, values, c.width_exponent, c.s, &params)?;
    let rows: Vec<CounterexampleRow> = cfgs
        .iter()
        .zip(&report.values)
        .zip(&report.fit.samples)
        .map(|((p, v), sample)| CounterexampleRow {
            n: p.n,
            half_width: p.half_width,
            lhs: v.lhs,
            lhs_direct: v.lhs_direct,
            lhs_exact: v.lhs_exact,
            ratio: sample.value,
        })
        .collect();
    let route_gap = report
        .values
        .iter()
        .map(|v| (v.lhs - v.lhs_direct).abs() / v.lhs.abs())
        .fold(0.0, f64::max);
    let warnings: Vec<&String> = report.values.iter().flat_map(|v| &v.warnings).collect();
    let verdict = match report.verdict {
        Verdict::EstimateFails => Expectation::Fails,
        Verdict::NoFailureDetected => Expectation::Bounded,
    };
    let summary = json!({
        "fit": fit_json(&report.fit),
        "predicted_exponent": report.predicted,
        "max_route_gap": route_gap,
        "warnings": warnings,
        "threshold": GROWTH_THRESHOLD,
        "verdict": verdict.name(),
    });
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: Some(verdict),
        checkpoints: Vec::new(),
    })
}

#[derive(Serialize)]
struct IllposedRow {
    n: u64,
    third_derivative: f64,
    restricted: f64,
    wn_norm: f64,
    ratio: f64,
    restricted_ratio: f64,
}

fn illposed(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome> {
    let params = cfg.params()?;
    let cfgs = cfg
        .sweep
        .n
        .iter()
        .map(|&n| cfg.illposed.point(n))
        .collect::<kplab::Result<Vec<_>>>()?;
    let norms = par(&cfgs, workers, |p| Ok(third_derivative_norm(p, &params)?))?;
    let report = illposed_report(&cfgs, norms, &params)?;
    let rows: Vec<IllposedRow> = cfgs
        .iter()
        .zip(&report.norms)
        .map(|(p, r)| IllposedRow {
            n: p.n,
            third_derivative: r.total,
            restricted: r.restricted,
            wn_norm: r.wn_norm,
            ratio: r.total / r.wn_norm.powi(3),
            restricted_ratio: r.restricted / r.wn_norm.powi(3),
        })
        .collect();
    let verdict = match report.verdict {
        SmoothnessVerdict::C3Fails => Expectation::Fails,
        SmoothnessVerdict::NoFailureDetected => Expectation::Bounded,
    };
    let summary = json!({
        "fit": fit_json(&report.fit),
        "restricted_fit": fit_json(&report.restricted_fit),
        "wn_fit": fit_json(&report.wn_fit),
        "predicted_exponent": report.predicted,
        "wn_predicted_exponent": cfg.illposed.s + 0.25,
        "threshold_s": 0.75 - params.alpha() / 2.0,
        "verdict": verdict.name(),
    });
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: Some(verdict),
        checkpoints: Vec::new(),
    })
}

/// Random checks of the modulation identity and its lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityStats {
    pub points: usize,
    pub max_residual: f64,
    pub floor_violations: usize,
    pub sign_disagreements: usize,
}

/// Draws `points` interactions with `1 <= |k|, |k1|, |k - k1| <= k_max`,
/// transverse frequencies in `[-eta_max, eta_max]` and modulations in `[-1, 1]`.
pub fn identity_check(
    params: &DispersionParams,
    k_max: i64,
    eta_max: f64,
    points: usize,
    seed: u64,
) -> Result<IdentityStats> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = IdentityStats {
        points,
        max_residual: 0.0,
        floor_violations: 0,
        sign_disagreements: 0,
    };
    let d = params.y_dims();
    let eta = |rng: &mut ChaCha8Rng| {
        let mut e = [0.0; 2];
        for x in e.iter_mut().take(d) {
            *x = rng.random_range(-eta_max..=eta_max);
        }
        e
    };
    let mut done = 0;
    while done < points {
        let k = rng.random_range(-k_max..=k_max);
        let k1 = rng.random_range(-k_max..=k_max);
        if k == 0 || k1 == 0 || k == k1 || (k - k1).abs() > k_max {
            continue;
        }
        let p = FrequencyPoint::new2(k, eta(&mut rng));
        let p1 = FrequencyPoint::new2(k1, eta(&mut rng));
        let tau = params.phase(&p)? + rng.random_range(-1.0..=1.0);
        let tau1 = params.phase(&p1)? + rng.random_range(-1.0..=1.0);
        let rec = resonance_identity(
            params,
            &ModulationPoint::new(params, tau, p)?,
            &ModulationPoint::new(params, tau1, p1)?,
        )?;
        stats.max_residual = stats.max_residual.max(rec.identity_residual());
        stats.floor_violations += usize::from(!rec.floor_holds(params));
        stats.sign_disagreements += usize::from(!rec.signs_agree());
        done += 1;
    }
    Ok(stats)
}

#[derive(Serialize)]
struct AuditRow {
    alpha: f64,
    k_max: i64,
    pairs_checked: u64,
    bound_violations: usize,
    min_ratio: f64,
    max_ratio: f64,
    identity_points: usize,
    max_identity_residual: f64,
    floor_violations: usize,
    sign_disagreements: usize,
}

/// Relative residual tolerated in the modulation identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

fn audit(cfg: &ExperimentConfig, workers: usize) -> Result<Outcome> {
    let a = &cfg.audit;
    let seed = cfg.sweep.seeds[0];
    let indexed: Vec<(usize, f64)> = a.alphas.iter().copied().enumerate().collect();
    let rows = par(&indexed, workers, |&(i, alpha)| {
        let params = DispersionParams::new(alpha, cfg.y_dims())?;
        let bounds = resonance_bounds_audit(&params, a.k_max)?;
        let id = identity_check(&params, a.k_max, a.eta_max, a.identity_points, seed.wrapping_add(i as u64))?;
        Ok(AuditRow {
            alpha,
            k_max: a.k_max,
            pairs_checked: bounds.pairs_checked,
            bound_violations: bounds.violations.len(),
            min_ratio: bounds.min_ratio,
            max_ratio: bounds.max_ratio,
            identity_points: id.points,
            max_identity_residual: id.max_residual,
            floor_violations: id.floor_violations,
            sign_disagreements: id.sign_disagreements,
        })
    })?;
    let clean = rows.iter().all(|r| {
        r.bound_violations == 0
            && r.floor_violations == 0
            && r.sign_disagreements == 0
            && r.max_identity_residual <= IDENTITY_TOLERANCE
    });
    let verdict = if clean { Expectation::Bounded } else { Expectation::Fails };
    let summary = json!({
        "bound_violations": rows.iter().map(|r| r.bound_violations).sum::<usize>(),
        "floor_violations": rows.iter().map(|r| r.floor_violations).sum::<usize>(),
        "max_identity_residual": rows.iter().map(|r| r.max_identity_residual).fold(0.0, f64::max),
        "identity_tolerance": IDENTITY_TOLERANCE,
        "verdict": verdict.name(),
    });
    Ok(Outcome {
        csv: to_csv(&rows)?,
        summary,
        verdict: Some(verdict),
        checkpoints: Vec::new(),
    })
}
